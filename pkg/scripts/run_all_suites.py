"""Run every registered suite on several model sizes and seeds; write one JSON report."""

import argparse
import json
import time
from pathlib import Path

from moebius.verify import SuiteConfig, run_all


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 7])
    ap.add_argument("--heis-k", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--euclid-n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--out", type=Path, default=Path("results/all_suites.json"))
    args = ap.parse_args()

    configs = [SuiteConfig(seed=s, k=k) for s in args.seeds for k in args.heis_k]
    configs += [SuiteConfig(seed=s, model="euclid", n=n) for s in args.seeds for n in args.euclid_n]
    runs = []
    for cfg in configs:
        t0 = time.perf_counter()
        summary = run_all(cfg)
        dim = cfg.k if cfg.model == "heis" else cfg.n
        print(f"{cfg.model:6s} dim={dim} seed={cfg.seed:<3d} {summary.passed}/{len(summary.reports)} passed  {time.perf_counter() - t0:5.1f}s")
        for r in summary.reports:
            if not r.passed:
                print(f"    FAIL {r.tag}: {r.worst_residual:.3e} > {r.tol:.1e}")
        runs.append({"model": cfg.model, "dim": dim, "seed": cfg.seed, **summary.to_json()})
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(runs, indent=2, sort_keys=True))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
