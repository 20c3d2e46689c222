"""Command-line frontend: verification suites, cross-ratios, inversions and sampled curves.

Exit codes: 0 success, 1 a suite failed, 2 bad flags or invalid input/geometry.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import geodesy as G
from .core import INF, ExtendedPoint, circle_residual, classify_triple, cross_ratio
from .errors import MoebiusError
from .euclidean import circle_through, euclid_inversion, euclidean_metric, euclidean_model
from .heisenberg import (
    c_circle_through,
    complex_to_real,
    heis_model,
    inversion_at,
    koranyi_metric,
    r_circle_through,
    unit_r_circle,
)
from .io import csv_text, fmt, json_text
from .verify import SuiteConfig, list_suites, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Invalid flags or input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# parsing helpers


def _default_seed() -> int:
    raw = os.environ.get("MOEBIUS_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"MOEBIUS_SEED must be an integer, got {raw!r}") from None


def _complex(tok: str) -> complex:
    t = tok.strip().replace(" ", "")
    if t in ("i", "+i"):
        return 1j
    if t == "-i":
        return -1j
    try:
        return complex(t.replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse {tok!r} as a number") from None


def _vectors(text: str, allow_complex: bool) -> list[np.ndarray]:
    """Comma-separated vectors; components within a vector separated by ':'."""
    out = []
    for item in text.split(","):
        comps = [_complex(c) for c in item.split(":")]
        if not allow_complex and any(c.imag != 0 for c in comps):
            raise UsageError(f"complex component in real vector {item!r}")
        out.append(np.array(comps if allow_complex else [c.real for c in comps]))
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _read_json(path: str | None):
    try:
        text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON input: {exc}") from None


def _point(obj) -> ExtendedPoint:
    """A point is a list of reals (packed coordinates), or null / "inf" for infinity."""
    if obj is None or obj in ("inf", "infinity"):
        return INF
    if isinstance(obj, dict):
        return ExtendedPoint.from_json(obj)
    if isinstance(obj, list) and obj and all(isinstance(v, (int, float)) for v in obj):
        return ExtendedPoint.finite(obj)
    raise UsageError(f"cannot parse point {obj!r}")


def _points(obj) -> list[ExtendedPoint]:
    if not isinstance(obj, list):
        raise UsageError("input must be a JSON list of points")
    pts = [_point(p) for p in obj]
    dims = {p.dim for p in pts if not p.is_inf}
    if len(dims) > 1:
        raise UsageError(f"points have mixed dimensions {sorted(dims)}")
    return pts


def _heis_k(args, dim: int | None = None) -> int:
    if args.k is not None:
        return args.k
    if dim is not None:
        if dim % 2 == 0:
            raise UsageError(f"Heisenberg points have odd length 2(k-1)+1, got {dim}")
        return (dim - 1) // 2 + 1
    return 2


def _check_dim(args, pts: list[ExtendedPoint]) -> int | None:
    dims = {p.dim for p in pts if not p.is_inf}
    dim = dims.pop() if dims else None
    if dim is None:
        return None
    if args.model == "heis":
        k = _heis_k(args, dim)
        if dim != 2 * k - 1:
            raise UsageError(f"points of length {dim} do not match --k {k}")
    elif args.n is not None and dim != args.n:
        raise UsageError(f"points of length {dim} do not match --n {args.n}")
    return dim


def _point_json(p: ExtendedPoint):
    return None if p.is_inf else list(p.coords)


# ---------------------------------------------------------------------------
# output


def _emit(args, text_csv: str | None = None, obj=None, text: str | None = None) -> None:
    """Write to --out (format by extension) or to stdout."""
    out = args.out
    if out is None:
        sys.stdout.write(text if text is not None else (text_csv if text_csv is not None else json_text(obj)))
        return
    suffix = Path(out).suffix.lower()
    if suffix == ".json":
        if obj is None:
            raise UsageError("this command has no JSON form; use a .csv output")
        Path(out).write_text(json_text(obj))
    elif suffix == ".csv":
        if text_csv is None:
            raise UsageError("this command has no CSV form; use a .json output")
        Path(out).write_text(text_csv)
    else:
        raise UsageError(f"output must end in .json or .csv, got {out!r}")
    if text is not None:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> int:
    if args.list:
        model = args.model
        rows = list_suites(model)
        sys.stdout.write("".join(f"{tag}\t{desc}\n" for tag, _, desc in rows))
        return EXIT_OK
    only = [t for t in args.only.split(",") if t] if args.only else None
    tolerances = {"*": args.tol} if args.tol is not None else {}
    if args.model == "heis":
        dims = [args.k] if args.k is not None else [2, 3]
    else:
        dims = [args.n if args.n is not None else 3]
    runs, lines, ok = [], [], True
    for d in dims:
        cfg = SuiteConfig(
            seed=args.seed,
            k=d if args.model == "heis" else 2,
            n=d if args.model == "euclid" else 3,
            samples=args.samples,
            tolerances=tolerances,
            depth=args.depth,
            model=args.model,
        )
        summary = run_all(cfg, only, workers=args.workers)
        ok &= summary.ok
        run = {"model": args.model, "dim": d, "seed": args.seed}
        run.update(summary.to_json(include_runtime=args.timing))
        runs.append(run)
        label = "k" if args.model == "heis" else "n"
        for r in summary.reports:
            status = "PASS" if r.passed else "FAIL"
            timing = f"  {r.runtime_ms}ms" if args.timing else ""
            lines.append(f"{status}  {label}={d}  {r.tag:<44} {r.worst_residual:.3e} <= {r.tol:.1e}{timing}\n")
        lines.append(f"# {label}={d}: {summary.passed}/{len(summary.reports)} passed\n")
    report = {"runs": runs, "ok": ok}
    table = "".join(lines)
    if args.out is not None:
        _emit(args, obj=report, text_csv=_check_csv(runs), text=table)
    else:
        sys.stdout.write(table)
    return EXIT_OK if ok else EXIT_FAIL


def _check_csv(runs) -> str:
    header = ["dim", "pass", "worst_residual", "tol", "n"]
    # tags are text, so the CSV is assembled by hand: tag first, then numeric fields
    lines = ["tag," + ",".join(header) + "\n"]
    for run in runs:
        for r in run["reports"]:
            lines.append(f"{r['tag']},{run['dim']},{int(r['pass'])},{fmt(r['worst_residual'])},{fmt(r['tol'])},{r['n']}\n")
    return "".join(lines)


def _metric(args, dim: int | None):
    if args.model == "heis":
        return koranyi_metric(_heis_k(args, dim))
    return euclidean_metric(dim if dim is not None else (args.n or 2))


def cmd_crt(args) -> int:
    pts = _points(_read_json(args.input))
    if len(pts) != 4:
        raise UsageError(f"a quadruple has 4 points, got {len(pts)}")
    dim = _check_dim(args, pts)
    t = cross_ratio(_metric(args, dim), pts)
    cls = classify_triple(t, args.tol if args.tol is not None else 1e-12)
    line = f"{':'.join(fmt(v) for v in t.as_tuple())} {cls.tag.value}\n"
    obj = {"triple": list(t.as_tuple()), "class": cls.tag.value, "slack": cls.slack}
    _emit(args, obj=obj, text=line)
    return EXIT_OK


def cmd_invert(args) -> int:
    pts = _points(_read_json(args.input))
    dim = _check_dim(args, pts)
    if dim is None:
        dim = 2 * _heis_k(args) - 1 if args.model == "heis" else (args.n or 2)
    center = _floats(args.center) if args.center else [0.0] * dim
    if len(center) != dim:
        raise UsageError(f"center has {len(center)} coordinates, points have {dim}")
    f = inversion_at(np.array(center), args.r) if args.model == "heis" else euclid_inversion(center, args.r)
    images = [f(p) for p in pts]
    obj = {"center": center, "r": args.r, "images": [_point_json(p) for p in images]}
    header = [f"x{i + 1}" for i in range(dim)]
    # the remote point is written as a row of inf so rows stay aligned with the input
    csv = csv_text(header, [[math.inf] * dim if p.is_inf else p.coords for p in images])
    _emit(args, text_csv=csv, obj=obj)
    return EXIT_OK


def _circle_summary(model_metric, pts: np.ndarray) -> float:
    finite = [ExtendedPoint.finite(p) for p in pts if np.all(np.isfinite(p))]
    return circle_residual(model_metric, finite[:: max(1, len(finite) // 8)][:8])


def cmd_circle(args) -> int:
    count = args.samples or 256
    if args.model == "euclid":
        if args.unit:
            n = args.n or 2
            e = np.eye(n)
            curve = circle_through(e[0], e[1] if n > 1 else -e[0], -e[0])
        else:
            pts = _points(_read_json(args.input))
            if len(pts) != 3:
                raise UsageError("an R-circle needs 3 points")
            _check_dim(args, pts)
            curve = circle_through(*pts)
        pts_arr = curve(curve.angles(count))
        metric = euclidean_metric(pts_arr.shape[-1])
        summary = {"kind": "line" if curve.is_line else "circle", "radius": float(curve.radius),
                   "ptolemy_residual": _circle_summary(metric, pts_arr)}
        rows = [(a, *p) for a, p in zip(curve.angles(count), pts_arr) if np.all(np.isfinite(p))]
        csv = csv_text(["t"] + [f"x{i + 1}" for i in range(pts_arr.shape[-1])], rows, summary)
        _emit(args, text_csv=csv, obj={"summary": summary})
        return EXIT_OK

    if args.unit:
        k = _heis_k(args)
        curve = unit_r_circle(k - 1)
    else:
        pts = _points(_read_json(args.input))
        dim = _check_dim(args, pts)
        k = _heis_k(args, dim)
        if args.complex:
            if len(pts) != 2:
                raise UsageError("a C-circle needs 2 points")
            curve = c_circle_through(*pts)
        else:
            if len(pts) != 3 or any(p.is_inf for p in pts):
                raise UsageError("an R-circle needs 3 finite points")
            curve = r_circle_through(*(p.array for p in pts))
    P = curve.sample(count)
    summary = {"kind": curve.kind, "ptolemy_residual": _circle_summary(koranyi_metric(k), P)}
    if args.unit:
        # every point of the unit R-circle is at distance 1 from the origin
        finite = P[np.all(np.isfinite(P), axis=-1)]
        radius = heis_model(k).dist(np.zeros(2 * k - 1), finite)
        summary["max_unit_radius_error"] = float(np.max(np.abs(radius - 1)))
    csv = curve.to_csv(count, summary)
    _emit(args, text_csv=csv, obj={"summary": summary})
    return EXIT_OK


def _model(args):
    if args.model == "heis":
        return heis_model(_heis_k(args))
    return euclidean_model(args.n or 2)


def _base_vectors(args, text: str, model) -> list[np.ndarray]:
    if args.model == "heis":
        vecs = _vectors(text, allow_complex=True)
        out = []
        for v in vecs:
            if v.size != model.m:
                raise UsageError(f"direction {v} needs {model.m} complex components")
            out.append(complex_to_real(v))
        return out
    vecs = _vectors(text, allow_complex=False)
    for v in vecs:
        if v.size != model.n:
            raise UsageError(f"direction {v} needs {model.n} components")
    return vecs


def _coord_header(args, model) -> list[str]:
    if args.model == "heis":
        return [f"{p}(z{i + 1})" for i in range(model.m) for p in ("re", "im")] + ["h"]
    return [f"x{i + 1}" for i in range(model.n)]


def cmd_zigzag(args) -> int:
    model = _model(args)
    dirs = _base_vectors(args, args.dirs, model)
    steps = _floats(args.steps)
    if len(steps) != len(dirs):
        raise UsageError("one step length per direction")
    if any(np.linalg.norm(d) == 0 for d in dirs):
        raise UsageError("directions must be nonzero")
    try:
        spec = G.ZigzagSpec(model.origin, np.array(dirs), np.array(steps), args.depth)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    total = float(spec.steps.sum())
    t_max = args.t_max if args.t_max is not None else total
    curve = G.zigzag(model, spec, t_max)
    keep = np.abs(curve.params) <= t_max * (1 + 1e-12)
    speed = G.endpoint_speed(model, curve, t_max)
    summary = {
        "depth": args.depth,
        "t": t_max,
        "speed": speed,
        "orthogonal_speed": math.sqrt(float(np.sum(spec.steps**2))) / total,
    }
    params, verts = curve.params[keep], curve.vertices[keep]
    if args.samples is not None and 1 < args.samples < len(params):
        # thin to evenly spaced vertices, always keeping both ends
        idx = np.unique(np.linspace(0, len(params) - 1, args.samples).round().astype(int))
        params, verts = params[idx], verts[idx]
    rows = (np.concatenate([[t], v]) for t, v in zip(params, verts))
    csv = csv_text(["t"] + _coord_header(args, model), rows, summary)
    _emit(args, text_csv=csv, obj={"summary": summary})
    return EXIT_OK


def cmd_lift(args) -> int:
    model = _model(args)
    if args.square is not None:
        a = b = args.square
    elif args.rect is not None:
        ab = _floats(args.rect)
        if len(ab) != 2:
            raise UsageError("--rect takes two side lengths a,b")
        a, b = ab
    else:
        raise UsageError("give --square or --rect")
    if not (a > 0 and b > 0):
        raise UsageError("side lengths must be positive")
    if args.plane is not None:
        u, v = _base_vectors(args, args.plane, model) if "," in args.plane else (None, None)
        if u is None:
            raise UsageError("--plane takes two vectors u,v")
    elif args.model == "heis":
        u, v = complex_to_real(np.eye(model.m)[0].astype(complex)), complex_to_real(1j * np.eye(model.m)[0])
    else:
        u, v = np.eye(model.n)[0], np.eye(model.n)[1 % model.n]
    u = u / np.linalg.norm(u)
    v = v - (v @ u) * u
    if np.linalg.norm(v) < 1e-12:
        raise UsageError("plane vectors are parallel")
    v = v / np.linalg.norm(v)
    lift = G.lift_polygon(model, G.rectangle(u, v, a, b))
    area = a * b
    summary = {
        "displacement": lift.displacement,
        "area": area,
        "lifting_constant": lift.displacement / math.sqrt(area),
        "base_residual": lift.base_residual,
    }
    rows = (np.concatenate([[i], p]) for i, p in enumerate(lift.trace))
    csv = csv_text(["vertex"] + _coord_header(args, model), rows, summary)
    _emit(args, text_csv=csv, obj={"summary": summary, "trace": lift.trace.tolist()})
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parser


def _common(p: argparse.ArgumentParser, seed: int) -> None:
    p.add_argument("--model", choices=("heis", "euclid"), default="heis", help="boundary model (default heis)")
    p.add_argument("--k", type=int, default=None, help="Heisenberg model of C^(k-1) x R, 2 <= k <= 4")
    p.add_argument("--n", type=int, default=None, help="Euclidean dimension")
    p.add_argument("--seed", type=int, default=seed, help="RNG seed (default $MOEBIUS_SEED or 0)")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--samples", type=int, default=None, help="sample count")
    p.add_argument("--depth", type=int, default=12, help="zigzag depth (default 12)")
    p.add_argument("--out", default=None, help="output file; .json or .csv")


def build_parser(seed: int = 0) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moebius",
        description="Moebius-geometry checks on R^n u {inf} and the Heisenberg group with the Koranyi gauge.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, tags):
        p = sub.add_parser(
            name,
            help=help_text,
            description=f"{help_text}\n\nRelated suites: {', '.join(tags)}.",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            allow_abbrev=False,
        )
        _common(p, seed)
        p.set_defaults(func=fn)
        return p

    p = add("check", cmd_check, "run verification suites (all, or --only tag,...)",
            ["every registered tag, e.g. eq:koranyi_gauge, lem:mean_geometric, pro:lift_const_2 (see --list)"])
    p.add_argument("--only", default=None, help="comma-separated suite tags")
    p.add_argument("--list", action="store_true", help="list suite tags and exit")
    p.add_argument("--timing", action="store_true", help="include per-suite runtime (breaks byte-identity)")
    p.add_argument("--workers", type=int, default=4, help="parallel suites (default 4)")

    p = add("crt", cmd_crt, "normalized cross-ratio triple a:b:c of a JSON quadruple and its Ptolemy class",
            ["def:crt/conventions", "pro:moeb_ptolemy/scan", "eq:PT_eq/euclidean-circles"])
    p.add_argument("input", nargs="?", default=None, help="JSON list of 4 points (default stdin)")

    p = add("invert", cmd_invert, "apply the inversion of radius r about a center to JSON points",
            ["lem:sinversion_minversion", "lem:sphere_sinversion", "def:m_inversion/equivalence"])
    p.add_argument("input", nargs="?", default=None, help="JSON list of points (default stdin)")
    p.add_argument("--center", default=None, help="comma-separated center coordinates (default origin)")
    p.add_argument("--r", type=float, default=1.0, help="inversion radius (default 1)")

    p = add("circle", cmd_circle, "sample an R-circle (3 points), a C-circle (--complex, 2 points) or the unit R-circle",
            ["pro:unit_rcircle", "lem:mean_geometric", "def:ptolemy_circle/r-circles", "cor:3c_4c"])
    p.add_argument("input", nargs="?", default=None, help="JSON list of points (default stdin)")
    p.add_argument("--unit", action="store_true", help="the unit R-circle through (0,+-1/4) and (1,0)")
    p.add_argument("--complex", action="store_true", help="C-circle through 2 points")

    p = add("zigzag", cmd_zigzag, "sample a zigzag polyline at a given depth with its endpoint speed",
            ["lem:busemann_affine_zigzag", "lem:uspeed_parameter_zigzag", "pro:zigzag_geodesic/cauchy"])
    p.add_argument("--dirs", required=True, help="base directions, e.g. 1,i (components joined by ':')")
    p.add_argument("--steps", required=True, help="step lengths, e.g. 1,1")
    p.add_argument("--t-max", type=float, default=None, help="parameter range (default sum of steps)")

    p = add("lift", cmd_lift, "lift a base rectangle horizontally and report the vertical displacement",
            ["pro:lift_const_2", "eq:area_law", "lem:unit_square", "negative:real-plane-c-zero"])
    p.add_argument("--square", type=float, default=None, help="side length of a square")
    p.add_argument("--rect", default=None, help="side lengths a,b")
    p.add_argument("--plane", default=None, help="spanning vectors u,v (default 1,i)")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser(_default_seed())
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"moebius: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, MoebiusError, ValueError) as exc:
        sys.stderr.write(f"moebius {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
