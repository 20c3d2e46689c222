"""Lifting constant of a base plane span(u, v) as v rotates from Ju into a real direction.

The fitted constant is compared with 2 sqrt|<Ju, v>| for the Heisenberg model with k = 3.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from moebius import geodesy as G
from moebius.heisenberg import complex_to_real, heis_model, real_to_complex
from moebius.io import csv_text


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=19)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/area_law_sweep.csv"))
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    model = heis_model(3)
    u = np.eye(model.base_dim)[0]
    ju = complex_to_real(1j * real_to_complex(u))
    real = np.eye(model.base_dim)[2]
    rects = [(a, b, rng.normal(size=model.base_dim)) for a, b in rng.uniform(0.1, 3.0, size=(20, 2))]
    rows, worst = [], 0.0
    for phi in np.linspace(0.0, math.pi / 2, args.steps):
        v = math.cos(phi) * ju + math.sin(phi) * real
        fit = G.area_law_fit(model, u, v, rects)
        expected = 2 * math.sqrt(abs(float(ju @ v)))
        worst = max(worst, abs(fit.c - expected))
        rows.append([phi, fit.c, expected, fit.r2])
        print(f"phi={phi:6.3f}  c={fit.c:.9f}  expected={expected:.9f}  r2={fit.r2:.12f}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(csv_text(["phi", "c", "expected", "r2"], rows, {"max_abs_error": worst}))
    print(f"max |c - expected| = {worst:.2e}; wrote {args.out}")


if __name__ == "__main__":
    main()
