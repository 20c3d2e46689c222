"""The extended Euclidean space R^n with one point at infinity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import INF, ExtendedPoint, MetricEvaluator, MoebiusMap, as_point
from .errors import DegenerateTriple, RadiusNonPositive, MapUndefinedAt
from .io import csv_text


def _euclid_pair(X, Y):
    return np.linalg.norm(np.asarray(X, float) - np.asarray(Y, float), axis=-1)


def euclidean_metric(n: int) -> MetricEvaluator:
    return MetricEvaluator(_euclid_pair, INF, f"euclid{n}")


def manhattan_metric(n: int) -> MetricEvaluator:
    """L1 metric; not Ptolemaic, used as a negative control."""

    def pair(X, Y):
        return np.sum(np.abs(np.asarray(X, float) - np.asarray(Y, float)), axis=-1)

    return MetricEvaluator(pair, INF, f"manhattan{n}")


def stereographic_lift(X: np.ndarray) -> np.ndarray:
    """Inverse stereographic projection R^n -> unit sphere in R^(n+1)."""
    X = np.asarray(X, float)
    r2 = np.sum(X * X, axis=-1, keepdims=True)
    return np.concatenate([2 * X, r2 - 1], axis=-1) / (r2 + 1)


def chordal_metric(n: int) -> MetricEvaluator:
    """Bounded metric |pi(x) - pi(y)| on the sphere; infinity is the north pole."""
    north = np.zeros(n + 1)
    north[-1] = 1.0

    def pair(X, Y):
        return np.linalg.norm(stereographic_lift(X) - stereographic_lift(Y), axis=-1)

    def extended(x: ExtendedPoint, y: ExtendedPoint):
        if x.is_inf or y.is_inf:
            p = y if x.is_inf else x
            return float(np.linalg.norm(stereographic_lift(p.array) - north))
        return None

    return MetricEvaluator(pair, None, f"chordal{n}", extended)


# ---------------------------------------------------------------------------
# lines and the geodesy protocol


@dataclass(frozen=True)
class EuclidLine:
    """Unit-speed line t -> point + t * direction."""

    point: np.ndarray
    direction: np.ndarray

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, float)
        return self.point + t[..., None] * self.direction

    def reversed(self) -> "EuclidLine":
        return EuclidLine(self.point, -self.direction)

    def through(self, p) -> "EuclidLine":
        return EuclidLine(np.asarray(p, float), self.direction)

    @property
    def base_direction(self) -> np.ndarray:
        return self.direction

    def foot(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Orthogonal projection parameter and distance to the line."""
        X = np.asarray(X, float)
        t = (X - self.point) @ self.direction
        return t, np.linalg.norm(X - self(t), axis=-1)

    def offset(self, X) -> np.ndarray:
        t, _ = self.foot(X)
        return np.asarray(X, float) - self(t)


@dataclass(frozen=True)
class EuclideanModel:
    n: int
    metric: MetricEvaluator = field(repr=False)

    @property
    def dim(self) -> int:
        return self.n

    @property
    def base_dim(self) -> int:
        return self.n

    @property
    def origin(self) -> np.ndarray:
        return np.zeros(self.n)

    def dist(self, X, Y) -> np.ndarray:
        return _euclid_pair(X, Y)

    def line(self, point, direction) -> EuclidLine:
        e = np.asarray(direction, float)
        return EuclidLine(np.asarray(point, float), e / np.linalg.norm(e))

    def base(self, X) -> np.ndarray:
        return np.asarray(X, float)

    def fiber_coordinate(self, X) -> np.ndarray:
        return np.zeros(np.shape(X)[:-1])

    def step(self, X, W) -> np.ndarray:
        return np.asarray(X, float) + np.asarray(W, float)

    def walk(self, o, steps) -> np.ndarray:
        """Positions after each successive step, starting from o."""
        return np.asarray(o, float) + np.cumsum(np.asarray(steps, float), axis=0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(size=(size, self.n))

    def fiber_point(self, w, h=0.0) -> np.ndarray:
        # fibers are single points here
        return np.asarray(w, float) + 0.0 * np.asarray(h, float)[..., None]


def euclidean_model(n: int) -> EuclideanModel:
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return EuclideanModel(n, euclidean_metric(n))


# ---------------------------------------------------------------------------
# circles


@dataclass(frozen=True)
class Circle:
    """A round circle, or a line together with infinity when ``is_line``.

    Parameterized by an angle in (-pi, pi].  For a line the angle a maps to
    point + tan(a/2) * e1, so a = pi is infinity.
    """

    center: np.ndarray
    radius: float
    e1: np.ndarray
    e2: np.ndarray
    is_line: bool = False

    def __call__(self, angle) -> np.ndarray:
        a = np.asarray(angle, float)
        if self.is_line:
            with np.errstate(over="ignore"):
                t = np.tan(a / 2)
            pts = self.center + t[..., None] * self.e1
            return np.where((np.abs(np.abs(a) - math.pi) < 1e-15)[..., None], np.inf, pts)
        return self.center + self.radius * (np.cos(a)[..., None] * self.e1 + np.sin(a)[..., None] * self.e2)

    def angles(self, m: int) -> np.ndarray:
        return -math.pi + 2 * math.pi * (np.arange(m) + 1) / m

    def sample(self, m: int) -> list[ExtendedPoint]:
        out = []
        for row in self(self.angles(m)):
            out.append(INF if not np.all(np.isfinite(row)) else ExtendedPoint.finite(row))
        return out

    def to_csv(self, m: int) -> str:
        a = self.angles(m)
        P = self(a)
        n = P.shape[-1]
        rows = [(ai, *pi) for ai, pi in zip(a, P) if np.all(np.isfinite(pi))]
        return csv_text(["angle"] + [f"x{i + 1}" for i in range(n)], rows)


def circle_through(p, q, r, rel_tol: float = 1e-12) -> Circle:
    pts = [as_point(x) for x in (p, q, r)]
    if len(set(pts)) < 3:
        raise DegenerateTriple("points must be pairwise distinct")
    finite = [x for x in pts if not x.is_inf]
    if len(finite) < 2:
        raise DegenerateTriple("at most one point may be infinity")
    dims = {x.dim for x in finite}
    if len(dims) != 1:
        raise DegenerateTriple("points live in different dimensions")
    a = finite[0].array
    u = finite[1].array - a
    e1 = u / np.linalg.norm(u)
    if len(finite) == 2:
        return Circle(a, math.inf, e1, np.zeros_like(e1), is_line=True)
    b = finite[2].array - a
    bx = b @ e1
    perp = b - bx * e1
    h = np.linalg.norm(perp)
    if h <= rel_tol * max(np.linalg.norm(u), np.linalg.norm(b)):
        # collinear: the generalized circle is the line through them plus infinity
        return Circle(a, math.inf, e1, np.zeros_like(e1), is_line=True)
    e2 = perp / h
    ux = np.linalg.norm(u)
    # circumcenter in the (e1, e2) frame anchored at a
    cx = ux / 2
    cy = (bx * bx + h * h - ux * bx) / (2 * h)
    center = a + cx * e1 + cy * e2
    return Circle(center, float(math.hypot(cx, cy)), e1, e2)


# ---------------------------------------------------------------------------
# maps


def euclid_inversion(center, r: float = 1.0) -> MoebiusMap:
    """x -> c + r^2 (x - c) / |x - c|^2, swapping c and infinity."""
    c = as_point(center)
    if c.is_inf:
        raise MapUndefinedAt(c, "inversion center must be finite")
    if not r > 0:
        raise RadiusNonPositive(f"radius must be positive, got {r}")
    ca, r2 = c.array, float(r) ** 2

    def batch(X):
        D = np.asarray(X, float) - ca
        n2 = np.sum(D * D, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = ca + r2 * D / n2
        return np.where(n2 == 0, np.inf, out)

    def fwd(p: ExtendedPoint) -> ExtendedPoint:
        if p.is_inf:
            return c
        if p == c:
            return INF
        return ExtendedPoint.finite(batch(p.array))

    return MoebiusMap(fwd, fwd, f"inv(c={c.coords}, r={r})", batch)


def similarity(scale: float = 1.0, rotation=None, shift=None) -> MoebiusMap:
    """x -> scale * R x + shift; fixes infinity."""

    def batch(X):
        X = np.asarray(X, float)
        Y = X if rotation is None else X @ np.asarray(rotation, float).T
        Y = scale * Y
        return Y if shift is None else Y + np.asarray(shift, float)

    def inv_batch(Y):
        Y = np.asarray(Y, float)
        if shift is not None:
            Y = Y - np.asarray(shift, float)
        Y = Y / scale
        return Y if rotation is None else Y @ np.asarray(rotation, float)

    def lift(f):
        return lambda p: INF if p.is_inf else ExtendedPoint.finite(f(p.array))

    return MoebiusMap(lift(batch), lift(inv_batch), f"sim(s={scale})", batch)
