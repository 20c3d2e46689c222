"""Model-independent Moebius machinery.

Points live in an extended space: a finite coordinate tuple or the single
point at infinity.  A metric is an immutable evaluator with at most one
infinitely remote point ``omega``; cross-ratio triples, m-inversions and
Ptolemy checks are built on top of it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    CenterIsOmega,
    InadmissibleQuadruple,
    MapUndefinedAt,
    MetricDomainError,
    RadiusNonPositive,
    TooFewPoints,
)

# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class ExtendedPoint:
    """A finite coordinate tuple, or infinity when ``coords`` is None."""

    coords: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.coords is not None:
            c = tuple(float(v) for v in self.coords)
            if not all(math.isfinite(v) for v in c):
                raise ValueError(f"non-finite coordinate in {c}")
            object.__setattr__(self, "coords", c)

    @classmethod
    def finite(cls, coords: Iterable[float]) -> "ExtendedPoint":
        return cls(tuple(np.ravel(np.asarray(coords, dtype=float))))

    @property
    def is_inf(self) -> bool:
        return self.coords is None

    @property
    def dim(self) -> int | None:
        return None if self.coords is None else len(self.coords)

    @property
    def array(self) -> np.ndarray:
        if self.coords is None:
            raise MetricDomainError("infinity has no coordinates")
        return np.asarray(self.coords, dtype=float)

    def to_json(self) -> dict:
        if self.coords is None:
            return {"kind": "infinity"}
        return {"kind": "finite", "coords": list(self.coords)}

    @classmethod
    def from_json(cls, obj) -> "ExtendedPoint":
        if isinstance(obj, (list, tuple)):
            return cls.finite(obj)
        kind = obj.get("kind")
        if kind == "infinity":
            return INF
        if kind == "finite":
            return cls.finite(obj["coords"])
        raise ValueError(f"unknown point kind {kind!r}")

    def __repr__(self) -> str:
        return "INF" if self.coords is None else f"P{self.coords}"


INF = ExtendedPoint(None)


def as_point(p) -> ExtendedPoint:
    if isinstance(p, ExtendedPoint):
        return p
    if p is None:
        return INF
    return ExtendedPoint.finite(p)


Quadruple = tuple[ExtendedPoint, ExtendedPoint, ExtendedPoint, ExtendedPoint]


def _rows_equal(X: np.ndarray, p: np.ndarray) -> np.ndarray:
    return np.all(X == p, axis=-1)


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class MetricEvaluator:
    """Pairwise distance on extended points.

    ``pair`` is the vectorized distance on finite coordinate arrays (leading
    axes broadcast).  ``extended`` handles patterns involving infinity or a
    finite omega; it returns None to fall through to ``pair``.
    """

    pair: Callable[[np.ndarray, np.ndarray], np.ndarray]
    omega: ExtendedPoint | None = INF
    label: str = "metric"
    extended: Callable[[ExtendedPoint, ExtendedPoint], float | None] | None = None

    def __call__(self, x, y) -> float:
        x, y = as_point(x), as_point(y)
        if x == y:
            return 0.0
        if self.omega is not None and (x == self.omega or y == self.omega):
            return math.inf
        if self.extended is not None:
            v = self.extended(x, y)
            if v is not None:
                return float(v)
        if x.is_inf or y.is_inf:
            raise MetricDomainError(f"{self.label}: no rule for {x!r}, {y!r}")
        return float(self.pair(x.array, y.array))

    def is_omega(self, p: ExtendedPoint) -> bool:
        return self.omega is not None and p == self.omega

    def matrix(self, pts: Sequence[ExtendedPoint]) -> np.ndarray:
        """Symmetric distance matrix, vectorized when every point is generic."""
        pts = [as_point(p) for p in pts]
        generic = all(not p.is_inf and not self.is_omega(p) for p in pts)
        if generic:
            P = np.array([p.array for p in pts])
            M = np.asarray(self.pair(P[:, None, :], P[None, :, :]), dtype=float)
            np.fill_diagonal(M, 0.0)
            return M
        n = len(pts)
        M = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                M[i, j] = M[j, i] = self(pts[i], pts[j])
        return M


def distances_to(d: MetricEvaluator, p: ExtendedPoint, X: np.ndarray) -> np.ndarray:
    """d(p, x) for every row x of X (finite, generic rows)."""
    if p.is_inf or d.is_omega(p):
        flat = X.reshape(-1, X.shape[-1])
        out = np.array([d(p, ExtendedPoint.finite(x)) for x in flat])
        return out.reshape(X.shape[:-1])
    out = np.asarray(d.pair(p.array, X), dtype=float)
    return np.where(_rows_equal(X, p.array), 0.0, out)


# ---------------------------------------------------------------------------
# cross-ratio triples


@dataclass(frozen=True)
class CrossRatioTriple:
    a: float
    b: float
    c: float

    @classmethod
    def normalized(cls, a: float, b: float, c: float) -> "CrossRatioTriple":
        s = a + b + c
        if not (s > 0 and math.isfinite(s)):
            raise MetricDomainError(f"cannot normalize triple ({a}, {b}, {c})")
        return cls(a / s, b / s, c / s)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def distance(self, other: "CrossRatioTriple") -> float:
        return max(abs(u - v) for u, v in zip(self.as_tuple(), other.as_tuple()))


class PtolemyTag(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    VIOLATION = "violation"


@dataclass(frozen=True)
class PtolemyClass:
    tag: PtolemyTag
    slack: float


def is_admissible(Q: Sequence[ExtendedPoint]) -> bool:
    Q = [as_point(p) for p in Q]
    return all(Q.count(p) < 3 for p in Q)


def _factor(d: MetricEvaluator, x: ExtendedPoint, y: ExtendedPoint) -> float:
    # distances to omega cancel in the projective triple, so they count as 1;
    # d(omega, omega) = 0 then gives (0:1:1) when omega appears twice
    if x == y:
        return 0.0
    if d.is_omega(x) or d.is_omega(y):
        return 1.0
    return d(x, y)


def cross_ratio(d: MetricEvaluator, Q: Sequence) -> CrossRatioTriple:
    x, y, z, u = (as_point(p) for p in Q)
    if not is_admissible((x, y, z, u)):
        raise InadmissibleQuadruple(f"entry repeated three or more times in {Q!r}")
    f = lambda p, q: _factor(d, p, q)  # noqa: E731
    return CrossRatioTriple.normalized(
        f(x, y) * f(z, u), f(x, z) * f(y, u), f(x, u) * f(y, z)
    )


def cross_ratio_batch(d: MetricEvaluator, X, Y, Z, U) -> np.ndarray:
    """Normalized triples for rows of finite, pairwise distinct, non-omega points."""
    P = np.stack(
        [
            d.pair(X, Y) * d.pair(Z, U),
            d.pair(X, Z) * d.pair(Y, U),
            d.pair(X, U) * d.pair(Y, Z),
        ],
        axis=-1,
    )
    return P / P.sum(axis=-1, keepdims=True)


def classify_triple(t: CrossRatioTriple, tol: float = 1e-12) -> PtolemyClass:
    a, b, c = t.as_tuple()
    s = a + b + c
    slack = min(s - 2 * a, s - 2 * b, s - 2 * c)
    if slack > tol:
        tag = PtolemyTag.INTERIOR
    elif slack >= -tol:
        tag = PtolemyTag.BOUNDARY
    else:
        tag = PtolemyTag.VIOLATION
    return PtolemyClass(tag, slack)


# ---------------------------------------------------------------------------
# m-inversion


def m_invert(d: MetricEvaluator, z, r: float = 1.0) -> MetricEvaluator:
    """The metric r^2 d(x,y) / (d(z,x) d(z,y)), for which z is infinitely remote."""
    z = as_point(z)
    if not r > 0:
        raise RadiusNonPositive(f"radius must be positive, got {r}")
    if d.is_omega(z):
        raise CenterIsOmega("cannot invert at the infinitely remote point")
    r2 = float(r) ** 2
    old = d.omega

    def extended(x: ExtendedPoint, y: ExtendedPoint):
        if x == z or y == z:
            return math.inf
        if old is not None and x == old:
            return r2 / d(y, z)
        if old is not None and y == old:
            return r2 / d(x, z)
        if x.is_inf or y.is_inf:
            return r2 * d(x, y) / (d(z, x) * d(z, y))
        return None

    def pair(X, Y):
        X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
        with np.errstate(divide="ignore", invalid="ignore"):
            dzx = distances_to(d, z, X)
            dzy = distances_to(d, z, Y)
            out = r2 * np.asarray(d.pair(X, Y), float) / (dzx * dzy)
        if old is not None and not old.is_inf:
            ox, oy = _rows_equal(X, old.array), _rows_equal(Y, old.array)
            out = np.where(ox, r2 / dzy, out)
            out = np.where(oy, r2 / dzx, out)
        if not z.is_inf:
            hit = _rows_equal(X, z.array) | _rows_equal(Y, z.array)
            out = np.where(hit, np.inf, out)
        return np.where(_rows_equal(X, Y), 0.0, out)

    return MetricEvaluator(pair, z, f"inv[{d.label}; {z!r}, r={r}]", extended)


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class MoebiusMap:
    """A point map with optional inverse and a vectorized path on finite rows.

    ``batch`` maps an (..., dim) array of finite points; rows whose image is
    infinity come back filled with ``inf``.
    """

    forward: Callable[[ExtendedPoint], ExtendedPoint]
    inverse: Callable[[ExtendedPoint], ExtendedPoint] | None = None
    label: str = "map"
    batch: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, p) -> ExtendedPoint:
        return self.forward(as_point(p))

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.batch is not None:
            return self.batch(X)
        flat = X.reshape(-1, X.shape[-1])
        rows = []
        for x in flat:
            img = self.forward(ExtendedPoint.finite(x))
            rows.append(np.full(x.shape, np.inf) if img.is_inf else img.array)
        return np.array(rows).reshape(X.shape[:-1] + (-1,))

    def inverted(self) -> "MoebiusMap":
        if self.inverse is None:
            raise ValueError(f"{self.label}: inverse unknown")
        return MoebiusMap(self.inverse, self.forward, f"({self.label})^-1")


def identity_map() -> MoebiusMap:
    return MoebiusMap(lambda p: p, lambda p: p, "id", lambda X: np.array(X, float))


def compose(*maps: MoebiusMap) -> MoebiusMap:
    """compose(f, g, h) = f o g o h."""
    seq = list(maps)

    def fwd(p):
        for m in reversed(seq):
            p = m(p)
        return p

    inv = None
    if all(m.inverse is not None for m in seq):

        def inv(p):
            for m in seq:
                p = m.inverse(p)
            return p

    batch = None
    if all(m.batch is not None for m in seq):

        def batch(X):
            for m in reversed(seq):
                X = m.batch(X)
            return X

    return MoebiusMap(fwd, inv, " o ".join(m.label for m in seq), batch)


def pullback(d: MetricEvaluator, f: MoebiusMap) -> MetricEvaluator:
    """The metric (x, y) -> d(f(x), f(y))."""
    omega = None
    if d.omega is not None and f.inverse is not None:
        omega = f.inverse(d.omega)

    def image(p: ExtendedPoint) -> ExtendedPoint:
        try:
            return f(p)
        except ZeroDivisionError as exc:  # pragma: no cover - maps raise their own
            raise MapUndefinedAt(p) from exc

    def extended(x, y):
        if x.is_inf or y.is_inf or (omega is not None and not omega.is_inf):
            return d(image(x), image(y))
        return None

    def pair(X, Y):
        X, Y = np.broadcast_arrays(np.asarray(X, float), np.asarray(Y, float))
        FX, FY = f.apply(X), f.apply(Y)
        with np.errstate(invalid="ignore"):
            out = np.asarray(d.pair(FX, FY), dtype=float)
        bad = ~(np.isfinite(FX).all(-1) & np.isfinite(FY).all(-1))
        if np.any(bad):
            out = np.array(out, copy=True)
            for idx in zip(*np.nonzero(bad)):
                out[idx] = d(image(ExtendedPoint.finite(X[idx])), image(ExtendedPoint.finite(Y[idx])))
        return np.where(_rows_equal(X, Y), 0.0, out)

    return MetricEvaluator(pair, omega, f"{f.label}*{d.label}", extended)


def _quads_array(quads) -> np.ndarray | None:
    if isinstance(quads, np.ndarray):
        return quads
    return None


def moebius_residual(d: MetricEvaluator, f: MoebiusMap, quads) -> float:
    """Max simplex-coordinate change of cross-ratio triples under f.

    ``quads`` is either a list of quadruples of points or an (n, 4, dim) array
    of finite points (vectorized path).
    """
    arr = _quads_array(quads)
    if arr is not None and f.batch is not None:
        before = cross_ratio_batch(d, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])
        img = f.apply(arr)
        ok = np.isfinite(img).all(axis=(-1, -2))
        after = np.full_like(before, np.nan)
        after[ok] = cross_ratio_batch(d, img[ok, 0], img[ok, 1], img[ok, 2], img[ok, 3])
        worst = float(np.max(np.abs(before[ok] - after[ok]), initial=0.0))
        for q in arr[~ok]:
            worst = max(worst, _quad_residual(d, f, [ExtendedPoint.finite(p) for p in q]))
        return worst
    if arr is not None:
        quads = [[ExtendedPoint.finite(p) for p in q] for q in arr]
    return max((_quad_residual(d, f, q) for q in quads), default=0.0)


def _quad_residual(d, f, Q) -> float:
    Q = [as_point(p) for p in Q]
    return cross_ratio(d, Q).distance(cross_ratio(d, [f(p) for p in Q]))


# ---------------------------------------------------------------------------
# scans


@dataclass
class ScanReport:
    n: int
    min_slack: float
    worst: list[ExtendedPoint]
    counts: dict[str, int] = field(default_factory=dict)

    def to_json(self, suite: str = "ptolemy_scan", seed: int | None = None) -> dict:
        return {
            "suite": suite,
            "n": self.n,
            "min_slack": self.min_slack,
            "worst_case": [p.to_json() for p in self.worst],
            "seed": seed,
            "counts": dict(self.counts),
        }


Sampler = Callable[[np.random.Generator, int], np.ndarray]


def ptolemy_scan(
    d: MetricEvaluator,
    sampler: Sampler,
    n: int,
    rng: np.random.Generator | int = 0,
    tol: float = 1e-12,
    chunk: int = 50_000,
) -> ScanReport:
    """Classify n random quadruples; slack is relative to the largest product."""
    rng = np.random.default_rng(rng)
    best, worst_q = math.inf, None
    counts = {t.value: 0 for t in PtolemyTag}
    done = 0
    while done < n:
        m = min(chunk, n - done)
        pts = sampler(rng, 4 * m).reshape(m, 4, -1)
        X, Y, Z, U = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
        P = np.stack(
            [d.pair(X, Y) * d.pair(Z, U), d.pair(X, Z) * d.pair(Y, U), d.pair(X, U) * d.pair(Y, Z)],
            axis=-1,
        )
        s = P.sum(axis=-1, keepdims=True)
        slack = np.min(s - 2 * P, axis=-1) / np.max(P, axis=-1)
        counts["interior"] += int(np.sum(slack > tol))
        counts["boundary"] += int(np.sum(np.abs(slack) <= tol))
        counts["violation"] += int(np.sum(slack < -tol))
        i = int(np.argmin(slack))
        if slack[i] < best:
            best, worst_q = float(slack[i]), pts[i]
        done += m
    worst = [ExtendedPoint.finite(p) for p in worst_q] if worst_q is not None else []
    return ScanReport(n, best, worst, counts)


def circle_residual(
    d: MetricEvaluator,
    pts: Sequence,
    max_quads: int | None = None,
    rng: np.random.Generator | int = 0,
) -> float:
    """Max relative Ptolemy-equality defect over cyclically ordered quadruples.

    For indices i < j < k < l the pair (p_i, p_k) separates (p_j, p_l), so
    d(p_i,p_k) d(p_j,p_l) should equal the sum of the two other products.
    """
    pts = [as_point(p) for p in pts]
    n = len(pts)
    if n < 4:
        raise TooFewPoints(f"need at least 4 points, got {n}")
    M = d.matrix(pts)
    # omega factors cancel projectively (same convention as cross_ratio)
    for i, p in enumerate(pts):
        if d.is_omega(p):
            M[i, :] = 1.0
            M[:, i] = 1.0
            M[i, i] = 0.0
    total = math.comb(n, 4)
    if max_quads is not None and total > max_quads:
        rng = np.random.default_rng(rng)
        idx = np.sort(np.array([rng.choice(n, 4, replace=False) for _ in range(max_quads)]), axis=1)
    else:
        idx = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(n), 4)),
            dtype=np.int64,
            count=4 * total,
        ).reshape(-1, 4)
    i, j, k, l = idx.T
    long = M[i, k] * M[j, l]
    short = M[i, j] * M[k, l] + M[i, l] * M[j, k]
    return float(np.max(np.abs(long - short) / np.maximum(long, short)))
