"""Busemann affinity deviation and Cauchy gap of zigzag curves as the depth grows."""

import argparse
from pathlib import Path

import numpy as np

from moebius import geodesy as G
from moebius.heisenberg import heis_model
from moebius.io import csv_text


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--depths", type=int, nargs="+", default=list(range(4, 13)))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/zigzag_depth.csv"))
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    model = heis_model(args.k)
    dirs = np.linalg.qr(rng.normal(size=(model.base_dim, model.base_dim)))[0].T[:2]
    steps = rng.uniform(0.2, 1.0, size=2)
    direction = rng.normal(size=model.base_dim)
    line = model.line(model.sample(rng, 1)[0], direction / np.linalg.norm(direction))
    alphas = [G.slope_estimate(model, model.line(model.origin, e), line) for e in dirs]
    rows, prev = [], None
    for p in args.depths:
        spec = G.ZigzagSpec(model.origin, dirs, steps, p)
        dev, beta = G.zigzag_affinity(model, spec, line, alphas)
        gap = G.zigzag_cauchy_gap(model, spec)
        ratio = dev / prev if prev else float("nan")
        rows.append([p, dev, ratio, gap, beta])
        print(f"depth={p:2d}  deviation={dev:.3e}  ratio={ratio:.3f}  cauchy_gap={gap:.3e}")
        prev = dev
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(csv_text(["depth", "deviation", "ratio", "cauchy_gap", "beta"], rows))
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
