"""CSV / JSON writers shared by the CLI and the experiment scripts."""

from __future__ import annotations

import io
import json
from typing import Iterable, Sequence


def fmt(x: float) -> str:
    """17 significant digits: round-trips every double."""
    return format(float(x), ".17g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]], summary: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    if summary:
        # comment line so numeric loaders (np.loadtxt, pandas comment='#') skip it
        buf.write("# summary," + ",".join(f"{k}={_summary_value(v)}" for k, v in summary.items()) + "\n")
    return buf.getvalue()


def _summary_value(v) -> str:
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"
