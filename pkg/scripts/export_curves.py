"""Export sampled R-circles, a C-circle and zigzag curves as CSV for plotting."""

import argparse
from pathlib import Path

import numpy as np

from moebius import geodesy as G
from moebius.core import ExtendedPoint
from moebius.heisenberg import c_circle_through, heis_model, inversion_at, mul, pack, r_circle_through, unit_r_circle
from moebius.io import csv_text

HEADER = ["t", "re(z1)", "im(z1)", "h"]


def sampled(curve, n: int) -> str:
    th = curve.angles(n)
    return csv_text(HEADER, (np.concatenate([[t], p]) for t, p in zip(th, curve(th))))


def r_circle_example():
    """R-circle through a, b and a third point found by inverting at a and sliding b horizontally."""
    a, b = np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0])
    psi = inversion_at(a, 1.0)
    c = psi.apply(mul(psi.apply(b), pack(np.array([0.3 + 0.5j]), 0.0)))
    return r_circle_through(a, b, c)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--depth", type=int, default=10)
    ap.add_argument("--out", type=Path, default=Path("results/curves"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    model = heis_model(2)

    files = {
        "unit_r_circle.csv": sampled(unit_r_circle(1), args.samples),
        "r_circle_three_points.csv": sampled(r_circle_example(), args.samples),
        "c_circle.csv": sampled(
            c_circle_through(ExtendedPoint.finite([0.2, -0.1, 0.0]), ExtendedPoint.finite([0.2, -0.1, 1.5])), args.samples
        ),
    }
    frames = {"orthogonal": (np.eye(2), [1.0, 1.0]), "skew": (np.array([[1.0, 0.0], [0.6, 0.8]]), [1.0, 0.5])}
    for name, (dirs, steps) in frames.items():
        spec = G.ZigzagSpec(model.origin, dirs, np.array(steps), args.depth)
        curve = G.zigzag(model, spec)
        rows = (np.concatenate([[t], v]) for t, v in zip(curve.params, curve.vertices))
        speed = G.endpoint_speed(model, curve, float(np.sum(steps)))
        files[f"zigzag_{name}.csv"] = csv_text(HEADER, rows, {"depth": args.depth, "speed": speed})
    for name, text in files.items():
        (args.out / name).write_text(text)
        print(f"wrote {args.out / name}")


if __name__ == "__main__":
    main()
