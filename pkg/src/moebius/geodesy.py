"""Numerical geodesy on a model exposing lines, horizontal steps and fibers.

A *model* here is anything with the small protocol shared by
``EuclideanModel`` and ``HeisModel``: ``dist``, ``line``, ``base``,
``fiber_coordinate``, ``fiber_point``, ``step``, ``walk`` and ``metric``.
Points are packed real arrays; base vectors are real arrays of length
``model.base_dim``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, least_squares, minimize_scalar

from .core import m_invert, INF, ExtendedPoint
from .errors import (
    CircleDoesNotMeetFiberTwice,
    EdgeLiftFailed,
    MaximizerNotIsolated,
    NonAffine,
    NonConvergent,
    NotOrthogonal,
    ParameterizationFailed,
    SlopeEstimationFailed,
)

Curve = Callable[[np.ndarray], np.ndarray]

# ---------------------------------------------------------------------------
# Busemann functions


@dataclass(frozen=True)
class BusemannScheme:
    """Evaluation parameters (scaled by the distance to the line origin) and tolerance."""

    t_values: tuple[float, ...] = (1e3, 2e3, 4e3)
    extrapolation: int = 2
    tol: float = 1e-6

    def __post_init__(self):
        t = np.asarray(self.t_values, float)
        if t.size < 3 or np.any(np.diff(t) <= 0):
            raise ValueError("t_values must be strictly increasing with at least 3 entries")
        if not 1 <= self.extrapolation <= t.size - 1:
            raise ValueError("extrapolation order must be between 1 and len(t_values) - 1")


@dataclass(frozen=True)
class Estimate:
    value: np.ndarray | float
    error: np.ndarray | float


def _extrapolate_to_zero(s: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Neville: value at s = 0 of the polynomial through (s_i, F_i); F has shape (n, ...)."""
    P = [F[i] for i in range(len(s))]
    for level in range(1, len(s)):
        P = [
            (s[i + level] * P[i] - s[i] * P[i + 1]) / (s[i + level] - s[i])
            for i in range(len(P) - 1)
        ]
    return P[0]


def _richardson(s: np.ndarray, F: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    # use the last order+1 samples (smallest s) and compare with one order less
    best = _extrapolate_to_zero(s[-(order + 1):], F[-(order + 1):])
    prev = _extrapolate_to_zero(s[-order:], F[-order:])
    return best, np.abs(best - prev)


def busemann(model, line, X, scheme: BusemannScheme | None = None, check: bool = True) -> Estimate:
    """lim (|x c(t)| - t) along the line, by Richardson extrapolation in 1/t."""
    scheme = scheme or BusemannScheme()
    X = np.asarray(X, float)
    scale = np.maximum(1.0, model.dist(X, line(np.zeros(X.shape[:-1]))))
    ts = np.asarray(scheme.t_values, float)
    F = np.stack([model.dist(X, line(t * scale)) - t * scale for t in ts])
    s = 1.0 / ts
    value, err = _richardson(s, F, scheme.extrapolation)
    if check and np.any(err > scheme.tol):
        raise NonConvergent(f"Busemann error estimate {np.max(err):.3g} exceeds {scheme.tol:.3g}")
    return Estimate(value, err)


def busemann_flat_residual(model, line, X, scheme: BusemannScheme | None = None) -> float:
    """max |b+(x) + b-(x)| with both functions vanishing at line(0)."""
    X = np.asarray(X, float)
    o = line(np.zeros(1))
    rev = line.reversed()
    bp = busemann(model, line, X, scheme).value - busemann(model, line, o, scheme).value[0]
    bm = busemann(model, rev, X, scheme).value - busemann(model, rev, o, scheme).value[0]
    return float(np.max(np.abs(bp + bm)))


def duality_residual(model, line, x, h0: float | None = None, levels: int = 5, tol: float = 1e-6) -> Estimate:
    """Compare Busemann functions with the log-derivative of the inverted distance.

    With omega' = line(0), d' the unit m-inversion at omega' and c(t) = line(1/t)
    (c(0) = infinity), b+(x) = d/dt ln d'(x, c(t)) at t = 0 and b- = -b+.
    The derivative is a centered difference refined by step halving.
    """
    x = np.asarray(x, float)
    w1 = line(np.zeros(1))[0]
    dprime = m_invert(model.metric, ExtendedPoint.finite(w1), 1.0)
    xp = ExtendedPoint.finite(x)
    scale = max(1.0, float(model.dist(x, w1)))
    h0 = h0 if h0 is not None else 0.05 / scale

    def F(t: float) -> float:
        c = INF if t == 0 else ExtendedPoint.finite(line(np.array(1.0 / t)))
        return math.log(dprime(xp, c))

    hs = h0 * 0.5 ** np.arange(levels)
    D = np.array([(F(h) - F(-h)) / (2 * h) for h in hs])
    deriv, err = _richardson(hs**2, D, levels - 1)
    if err > tol:
        raise NonConvergent(f"finite-difference error estimate {err:.3g} exceeds {tol:.3g}")
    bp = float(busemann(model, line, x).value)
    bm = float(busemann(model, line.reversed(), x).value)
    return Estimate(max(abs(bp - deriv), abs(bm + deriv)), float(err))


# ---------------------------------------------------------------------------
# slopes


@dataclass(frozen=True)
class SlopeFit:
    alpha: float
    beta: float
    affinity_residual: float


def slope_fit(model, l_prime, l, window: float = 1.0, samples: int = 21, tol: float = 1e-5) -> SlopeFit:
    """Least-squares line through t -> b_l(c'(t)) on [-window, window]."""
    t = np.linspace(-window, window, samples)
    b = busemann(model, l, l_prime(t)).value
    A = np.stack([t, np.ones_like(t)], axis=1)
    (alpha, beta), *_ = np.linalg.lstsq(A, b, rcond=None)
    res = float(np.max(np.abs(A @ np.array([alpha, beta]) - b)))
    if res > tol:
        raise NonAffine(f"Busemann function not affine along line: residual {res:.3g}")
    return SlopeFit(float(alpha), float(beta), res)


def slope_estimate(model, l_prime, l, **kw) -> float:
    return slope_fit(model, l_prime, l, **kw).alpha


def slope_symmetry_residual(model, l, l_prime) -> float:
    return abs(slope_estimate(model, l_prime, l) - slope_estimate(model, l, l_prime))


# ---------------------------------------------------------------------------
# zigzag curves


@dataclass(frozen=True)
class ZigzagSpec:
    o: np.ndarray
    directions: np.ndarray  # (m, base_dim) unit base vectors, one per oriented line
    steps: np.ndarray  # (m,) nonnegative
    depth: int = 12

    def __post_init__(self):
        s = np.asarray(self.steps, float)
        if np.any(s < 0) or s.sum() <= 0:
            raise ValueError("steps must be nonnegative with positive sum")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        dirs = np.atleast_2d(np.asarray(self.directions, float))
        if dirs.shape[0] != s.size:
            raise ValueError("one step length per direction")
        object.__setattr__(self, "directions", dirs / np.linalg.norm(dirs, axis=1, keepdims=True))
        object.__setattr__(self, "steps", s)
        object.__setattr__(self, "o", np.asarray(self.o, float))

    def at_depth(self, p: int) -> "ZigzagSpec":
        return ZigzagSpec(self.o, self.directions, self.steps, p)


@dataclass(frozen=True)
class Zigzag:
    """Piecewise geodesic curve: vertices at the canonical parameters."""

    model: object = field(repr=False)
    params: np.ndarray
    vertices: np.ndarray

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, float)
        i = np.clip(np.searchsorted(self.params, t, side="right") - 1, 0, len(self.params) - 2)
        t0, t1 = self.params[i], self.params[i + 1]
        B = self.model.base
        seg = B(self.vertices[i + 1]) - B(self.vertices[i])
        frac = ((t - t0) / (t1 - t0))[..., None]
        return self.model.step(self.vertices[i], frac * seg)


def zigzag(model, spec: ZigzagSpec, t_max: float | None = None) -> Zigzag:
    """gamma_p through o covering [-t_max, t_max] (default: one full period sum(s))."""
    S = float(spec.steps.sum())
    t_max = S if t_max is None else float(t_max)
    unit = 2.0 ** (spec.depth - 1)
    cycles = max(1, math.ceil(t_max * unit / S - 1e-12))
    fwd = (spec.directions * spec.steps[:, None]) / unit
    bwd = -fwd[::-1]
    lengths = spec.steps / unit
    fwd_steps = np.tile(fwd, (cycles, 1))
    bwd_steps = np.tile(bwd, (cycles, 1))
    ahead = model.walk(spec.o, fwd_steps)
    behind = model.walk(spec.o, bwd_steps)
    t_ahead = np.cumsum(np.tile(lengths, cycles))
    t_behind = -np.cumsum(np.tile(lengths[::-1], cycles))
    params = np.concatenate([t_behind[::-1], [0.0], t_ahead])
    vertices = np.concatenate([behind[::-1], spec.o[None, :], ahead])
    # zero-length steps duplicate vertices; keep the parameterization strictly increasing
    keep = np.concatenate([[True], np.diff(params) > 0])
    return Zigzag(model, params[keep], vertices[keep])


def vertex_parameter(spec: ZigzagSpec, n: int) -> float:
    """t_p^n for n = k(m - 1) + i, 1 <= i <= k."""
    k = spec.steps.size
    m, i = divmod(n - 1, k)
    m, i = m + 1, i + 1
    s = spec.steps
    return float((s[:i].sum() * m + s[i:].sum() * (m - 1)) / 2.0 ** (spec.depth - 1))


def endpoint_speed(model, curve: Zigzag, t: float) -> float:
    o = curve(np.array(0.0))
    return float(model.dist(o, curve(np.array(t)))) / abs(t)


def zigzag_affinity(model, spec: ZigzagSpec, line, alphas: Sequence[float] | None = None) -> tuple[float, float]:
    """max |b(gamma_p(t)) - beta t| over vertices, beta = sum(alpha_i s_i) / sum(s_i).

    ``alphas`` are the slopes of the zigzag lines w.r.t. ``line``; estimated
    numerically when omitted.  b is normalized to vanish at o.
    """
    if alphas is None:
        alphas = [slope_estimate(model, model.line(spec.o, e), line) for e in spec.directions]
    alphas = np.asarray(alphas, float)
    beta = float(alphas @ spec.steps / spec.steps.sum())
    curve = zigzag(model, spec)
    b = busemann(model, line, curve.vertices).value
    b0 = busemann(model, line, spec.o[None, :]).value[0]
    return float(np.max(np.abs(b - b0 - beta * curve.params))), beta


def zigzag_cauchy_gap(model, spec: ZigzagSpec) -> float:
    """max distance between depths p and p + 1 at the vertices of depth p."""
    a = zigzag(model, spec)
    b = zigzag(model, spec.at_depth(spec.depth + 1))
    return float(np.max(model.dist(a.vertices, b(a.params))))


@dataclass(frozen=True)
class Orthogonalization:
    directions: np.ndarray  # frame directions (reoriented) followed by the line's direction
    steps: np.ndarray
    alphas: np.ndarray
    sum_sq: float
    degenerate: bool


def orthogonalize(model, frame: Sequence, line, tol: float = 1e-3) -> Orthogonalization:
    """Steps (alpha_i / (1 + alpha), ..., 1 / (1 + alpha)) making the zigzag orthogonal to the frame.

    Frame lines are reoriented so that alpha_i = slope(line, l_i) >= 0.
    """
    frame = list(frame)
    try:
        for i in range(len(frame)):
            for j in range(i + 1, len(frame)):
                s = slope_estimate(model, frame[i], frame[j])
                if abs(s) > tol:
                    raise SlopeEstimationFailed(f"frame lines {i}, {j} not orthogonal (slope {s:.3g})")
        alphas, dirs = [], []
        for li in frame:
            a = slope_estimate(model, line, li)
            if a < 0:
                li, a = li.reversed(), -a
            alphas.append(a)
            dirs.append(li.base_direction)
    except NonAffine as exc:
        raise SlopeEstimationFailed(str(exc)) from exc
    alphas = np.asarray(alphas)
    total = alphas.sum()
    steps = np.append(alphas, 1.0) / (1 + total)
    dirs.append(line.base_direction)
    sum_sq = float(np.sum(alphas**2))
    return Orthogonalization(np.array(dirs), steps, alphas, sum_sq, abs(sum_sq - 1) <= tol)


# ---------------------------------------------------------------------------
# lifting polygons


@dataclass(frozen=True)
class BasePolygon:
    vertices: np.ndarray  # (n, base_dim)
    orientation: int = 1
    pointed: int = 0

    def cycle(self) -> np.ndarray:
        """Vertices starting at the pointed one, in the orientation's order, closed."""
        V = np.roll(np.asarray(self.vertices, float), -self.pointed, axis=0)
        if self.orientation < 0:
            V = np.concatenate([V[:1], V[1:][::-1]])
        return np.concatenate([V, V[:1]])


def rectangle(u, v, a: float = 1.0, b: float = 1.0, corner=None) -> BasePolygon:
    u, v = np.asarray(u, float), np.asarray(v, float)
    c = np.zeros_like(u) if corner is None else np.asarray(corner, float)
    return BasePolygon(np.array([c, c + a * u, c + a * u + b * v, c + b * v]))


@dataclass(frozen=True)
class PolygonLift:
    trace: np.ndarray
    end: np.ndarray
    displacement: float
    base_residual: float


def lift_polygon(model, P: BasePolygon, start=None, tol: float = 1e-9) -> PolygonLift:
    """Lift the sides horizontally in cyclic order; the end lands in the start fiber."""
    V = P.cycle()
    start = model.fiber_point(V[0], 0.0) if start is None else np.asarray(start, float)
    if np.linalg.norm(model.base(start) - V[0]) > tol * (1 + np.linalg.norm(V[0])):
        raise EdgeLiftFailed("start point does not project to the pointed vertex")
    trace = np.concatenate([start[None, :], model.walk(start, np.diff(V, axis=0))])
    scale = 1 + np.max(np.abs(V))
    dev = float(np.max(np.linalg.norm(model.base(trace) - V, axis=-1)))
    if dev > tol * scale:
        raise EdgeLiftFailed(f"lifted vertices leave the polygon by {dev:.3g}")
    end = trace[-1]
    base_res = float(np.linalg.norm(model.base(end) - model.base(start)))
    return PolygonLift(trace, end, float(model.dist(start, end)), base_res)


@dataclass(frozen=True)
class AreaLawFit:
    c: float
    residuals: np.ndarray
    r2: float
    linear: bool


def area_law_fit(model, u, v, rects: Sequence[tuple]) -> AreaLawFit:
    """Fit displacement^2 = c^2 * area over rectangles (a, b[, corner]) in span(u, v)."""
    u = np.asarray(u, float)
    u = u / np.linalg.norm(u)
    v = np.asarray(v, float)
    v = v - (v @ u) * u
    v = v / np.linalg.norm(v)
    areas, d2 = [], []
    for r in rects:
        a, b = r[0], r[1]
        corner = r[2] if len(r) > 2 else None
        lift = lift_polygon(model, rectangle(u, v, a, b, corner))
        areas.append(a * b)
        d2.append(lift.displacement**2)
    A, D = np.array(areas), np.array(d2)
    c2 = float(A @ D / (A @ A))
    res = D - c2 * A
    ss_tot = float(np.sum((D - D.mean()) ** 2))
    ss_res = float(np.sum(res**2))
    scale = max(float(np.max(np.abs(D))), 1.0) ** 2
    r2 = 1.0 if ss_tot <= 1e-24 * scale else 1 - ss_res / ss_tot
    return AreaLawFit(math.sqrt(max(c2, 0.0)), res, r2, r2 >= 1 - 1e-6)


def xi(model, u, v, scale: float = 1.0, tol: float = 1e-12) -> float:
    """Signed squared displacement of the lifted rectangle u ^ v, sign from the fiber order."""
    u, v = np.asarray(u, float), np.asarray(v, float)
    nv = np.linalg.norm(v)
    if nv == 0:
        return 0.0
    if abs(u @ v) > tol * max(1.0, nv):
        raise NotOrthogonal(f"<u, v> = {u @ v:.3g}")
    lift = lift_polygon(model, rectangle(scale * u, scale * v))
    dh = float(model.fiber_coordinate(lift.end) - model.fiber_coordinate(lift.trace[0]))
    return math.copysign(lift.displacement**2, dh) / scale**4 if dh != 0 else 0.0


def _orth_complement(u: np.ndarray) -> np.ndarray:
    _, _, Vt = np.linalg.svd(u[None, :])
    return Vt[1:]


def recover_J(model, u, grid_deg: float = 2.0, scale: float = 1.0, sweeps: int = 10, gap: float = 1e-3) -> np.ndarray:
    """Unit maximizer of v -> xi_u(v) over the unit sphere of the orthogonal complement of u.

    Coordinate-plane sweeps: in each plane span(v, e_j) a 2-degree grid locates
    the maximum, golden-section search refines it.
    """
    u = np.asarray(u, float)
    u = u / np.linalg.norm(u)
    basis = _orth_complement(u)
    f = lambda w: xi(model, u, w, scale=scale, tol=1e-9)  # noqa: E731
    cands = np.concatenate([basis, -basis])
    v = cands[int(np.argmax([f(c) for c in cands]))]
    phis = np.deg2rad(np.arange(-180.0, 180.0, grid_deg))
    step = np.deg2rad(grid_deg)
    for _ in range(sweeps):
        moved = 0.0
        for e in basis:
            e = e - (e @ v) * v - (e @ u) * u
            ne = np.linalg.norm(e)
            if ne < 1e-8:
                continue
            e = e / ne
            vals = np.array([f(math.cos(p) * v + math.sin(p) * e) for p in phis])
            j = int(np.argmax(vals))
            peaks = [i for i in range(len(vals)) if vals[i] >= vals[i - 1] and vals[i] >= vals[(i + 1) % len(vals)]]
            rivals = [i for i in peaks if min(abs(i - j), len(vals) - abs(i - j)) > 1 and vals[i] > vals[j] - gap]
            if rivals:
                raise MaximizerNotIsolated(f"competing maxima in plane sweep: {vals[j]:.6g} vs {vals[rivals[0]]:.6g}")
            res = minimize_scalar(
                lambda p: -f(math.cos(p) * v + math.sin(p) * e),
                bracket=(phis[j] - step, phis[j], phis[j] + step),
                method="golden",
                options={"xtol": 1e-12},
            )
            p = float(res.x)
            v = math.cos(p) * v + math.sin(p) * e
            v = v - (v @ u) * u
            v = v / np.linalg.norm(v)
            moved = max(moved, abs(p))
        if moved < 1e-9:
            break
    return v


def angle_between(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    c = np.clip(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)), -1.0, 1.0)
    return float(math.acos(c))


# ---------------------------------------------------------------------------
# distance components


def dist_components(model, X, Y) -> tuple[np.ndarray, np.ndarray]:
    """(base distance, fiber distance after moving x horizontally into y's fiber)."""
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    bx, by = model.base(X), model.base(Y)
    a = np.linalg.norm(bx - by, axis=-1)
    b = model.dist(model.step(X, by - bx), Y)
    return a, b


def d_law_residual(model, X, Y) -> float:
    a, b = dist_components(model, X, Y)
    d = model.dist(X, Y)
    d4 = d**4
    return float(np.max(np.abs(d4 - (a**4 + b**4)) / d4))


# ---------------------------------------------------------------------------
# crossings of a closed curve with a transversal zero set


def find_crossings(G: Callable[[np.ndarray], np.ndarray], n_grid: int = 2048, tol: float = 1e-9) -> list[float]:
    """Parameters in [-pi, pi) where the vector function G vanishes transversally.

    Candidates are grid minima of |G|; each is refined by bisection (brentq) on
    the component of G along its local direction of change.
    """
    th = -math.pi + 2 * math.pi * np.arange(n_grid) / n_grid
    Gv = G(th)
    norms = np.linalg.norm(Gv, axis=-1)
    h = 2 * math.pi / n_grid
    roots = []
    for j in range(n_grid):
        jm, jp = (j - 1) % n_grid, (j + 1) % n_grid
        if not (norms[j] <= norms[jm] and norms[j] < norms[jp]):
            continue
        e = Gv[jp] - Gv[jm]
        ne = np.linalg.norm(e)
        if ne == 0 or norms[j] > ne:
            continue
        e = e / ne
        f = lambda t: float(G(np.array(t)) @ e)  # noqa: E731
        a, b = th[j] - h, th[j] + h
        fa, fb = f(a), f(b)
        if fa * fb > 0:
            continue
        r = brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        if np.linalg.norm(G(np.array(r))) <= tol * max(1.0, float(np.max(norms))):
            roots.append(float(np.remainder(r + math.pi, 2 * math.pi) - math.pi))
    # merge duplicates found from neighbouring grid cells
    roots.sort()
    merged = []
    for r in roots:
        if not merged or min(abs(r - merged[-1]), 2 * math.pi - abs(r - merged[-1])) > 1e-9:
            merged.append(r)
    if len(merged) > 1 and 2 * math.pi - abs(merged[-1] - merged[0]) < 1e-9:
        merged.pop()
    return merged


def _arc(theta_from: float, theta_to: float) -> float:
    """Length of the increasing arc from theta_from to theta_to."""
    return float(np.remainder(theta_to - theta_from, 2 * math.pi))


# ---------------------------------------------------------------------------
# R-circle diagnostics


@dataclass
class CircleReport:
    crossings: tuple[float, float]
    x: np.ndarray
    y: np.ndarray
    center: np.ndarray
    radius: float
    mean_geometric: float
    unit_radius: float
    symmetric: float
    two_sheet: bool
    fiber_pythagoras: float

    def to_json(self) -> dict:
        return {
            "lem:mean_geometric": self.mean_geometric,
            "prop:unit_circle": self.unit_radius,
            "lem:equal_distances": self.symmetric,
            "cor:circle_cover_twice": self.two_sheet,
            "prop:fiber_pythagoras": self.fiber_pythagoras,
            "radius": self.radius,
            "crossings": list(self.crossings),
        }


def fiber_crossings(model, curve: Curve, z_F, n_grid: int = 2048) -> list[float]:
    z_F = np.asarray(z_F, float)
    return find_crossings(lambda th: model.base(curve(th)) - z_F, n_grid)


def circle_node(model, curve: Curve, n_grid: int = 1024) -> tuple[np.ndarray, tuple[float, float]]:
    """Base point over which the closed curve passes twice, and the two parameters."""
    th = -math.pi + 2 * math.pi * np.arange(n_grid) / n_grid
    B = model.base(curve(th))
    D = np.linalg.norm(B[:, None, :] - B[None, :, :], axis=-1)
    idx = np.arange(n_grid)
    sep = np.abs(idx[:, None] - idx[None, :])
    D[np.minimum(sep, n_grid - sep) < n_grid // 8] = np.inf
    i, j = np.unravel_index(int(np.argmin(D)), D.shape)
    # keep the two parameters in disjoint windows so they cannot merge
    w = math.pi / 8
    res = least_squares(
        lambda p: model.base(curve(np.array(p[0]))) - model.base(curve(np.array(p[1]))),
        x0=[th[i], th[j]],
        bounds=([th[i] - w, th[j] - w], [th[i] + w, th[j] + w]),
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
    )
    scale = 1 + float(np.max(np.abs(B)))
    if np.max(np.abs(res.fun)) > 1e-9 * scale:
        raise CircleDoesNotMeetFiberTwice("projection of the curve has no double point")
    a, b = (float(np.remainder(t + math.pi, 2 * math.pi) - math.pi) for t in res.x)
    return model.base(curve(np.array(a))), (a, b)


def _fiber_height_of_projection(model, curve: Curve, z_F):
    def m(th):
        P = curve(th)
        return model.fiber_coordinate(model.step(P, z_F - model.base(P)))

    return m


def _solve_on_arc(fn: Callable, target: float, a: float, length: float, n: int = 512) -> float:
    """First parameter in (a, a + length) where fn crosses target (grid bracket, then brentq)."""
    th = a + length * np.linspace(0, 1, n)
    vals = fn(th) - target
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    if sign_change.size == 0:
        raise ParameterizationFailed(f"value {target:.6g} not attained on arc")
    i = int(sign_change[0])
    if vals[i] == 0:
        return float(th[i])
    return brentq(lambda t: float(fn(np.array(t)) - target), th[i], th[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)


def circle_diagnostics(model, curve: Curve, z_F=None, n_grid: int = 2048, n_probe: int = 32) -> CircleReport:
    """Mean-geometric, unit-radius, equal-distance, two-sheet and fiber-Pythagoras checks
    for a Ptolemy circle meeting the fiber over z_F twice."""
    z_F = circle_node(model, curve, n_grid)[0] if z_F is None else np.asarray(z_F, float)
    roots = fiber_crossings(model, curve, z_F, n_grid)
    if len(roots) != 2:
        raise CircleDoesNotMeetFiberTwice(f"found {len(roots)} fiber crossings")
    P = curve(np.array(roots))
    order = np.argsort(model.fiber_coordinate(P))
    tx, ty = roots[order[0]], roots[order[1]]
    x, y = P[order[0]], P[order[1]]
    hx, hy = float(model.fiber_coordinate(x)), float(model.fiber_coordinate(y))
    center = model.fiber_point(z_F, 0.5 * (hx + hy))
    R = float(model.dist(x, center))
    dxy = float(model.dist(x, y))

    W = curve(-math.pi + 2 * math.pi * np.arange(4 * n_grid) / (4 * n_grid))
    unit = float(np.max(np.abs(model.dist(center, W) - R)) / R)

    m = _fiber_height_of_projection(model, curve, z_F)
    arcs = [(tx, _arc(tx, ty)), (ty, _arc(ty, tx))]
    two_sheet = True
    for a, L in arcs:
        vals = m(a + L * np.linspace(0, 1, n_grid // 2)[1:-1])
        steps = np.diff(vals)
        two_sheet &= bool(np.all(steps > 0) or np.all(steps < 0))

    hs = hx + (hy - hx) * (np.arange(1, n_probe + 1) / (n_probe + 1))
    mg, sym, pyth = 0.0, 0.0, 0.0
    for h in hs:
        z = model.fiber_point(z_F, h)
        dxz, dzy = float(model.dist(x, z)), float(model.dist(z, y))
        us = [curve(np.array(_solve_on_arc(m, h, a, L))) for a, L in arcs]
        du = [float(model.dist(z, u)) for u in us]
        mg = max(mg, max(abs(dxz * dzy - r * r) for r in du) / R**2)
        sym = max(sym, abs(du[0] - du[1]) / R)
        pyth = max(pyth, abs(dxy**2 - dxz**2 - dzy**2) / dxy**2)
    return CircleReport((tx, ty), x, y, center, R, mg, unit, sym, two_sheet, pyth)


def fiber_pythagoras_residual(model, z_F, heights: np.ndarray) -> float:
    """max | |xz|^2 - |xy|^2 - |yz|^2 | / |xz|^2 over ordered triples x < y < z in a fiber."""
    h = np.sort(np.asarray(heights, float), axis=-1)
    x, y, z = (model.fiber_point(z_F, h[..., i]) for i in range(3))
    dxz, dxy, dyz = model.dist(x, z), model.dist(x, y), model.dist(y, z)
    return float(np.max(np.abs(dxz**2 - dxy**2 - dyz**2) / dxz**2))


def rectifiability_exponent(model, curve: Curve, theta0: float, spans: Sequence[float], pieces: int = 64) -> tuple[np.ndarray, np.ndarray, float]:
    """Chord |xx'|, polygonal length minus chord, and the fitted exponent of the defect."""
    x = curve(np.array(theta0))
    chords, defects = [], []
    for s in spans:
        th = theta0 + s * np.linspace(0, 1, pieces + 1)
        P = curve(th)
        L = float(np.sum(model.dist(P[:-1], P[1:])))
        c = float(model.dist(x, P[-1]))
        chords.append(c)
        defects.append(L - c)
    chords, defects = np.array(chords), np.array(defects)
    slope = float(np.polyfit(np.log(chords), np.log(np.abs(defects)), 1)[0])
    return chords, defects, slope


# ---------------------------------------------------------------------------
# tangent lines


@dataclass(frozen=True)
class TangentFit:
    line: object
    ratios: np.ndarray  # dist(curve(s), line) / |curve(s) curve(s0)| for shrinking |s - s0|
    direction_change: float

    @property
    def decay(self) -> float:
        """Smallest over largest ratio; near 0 when the distance is o(chord)."""
        return float(self.ratios[-1] / self.ratios[0]) if self.ratios[0] > 0 else 0.0


def point_line_distance(model, line, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, float))
    t0, rho = line.foot(X)
    out = np.empty(len(X))
    for i in range(len(X)):
        if rho[i] == 0:
            out[i] = 0.0
            continue
        r = minimize_scalar(
            lambda t: float(model.dist(X[i], line(np.array(t)))),
            bounds=(t0[i] - 2 * rho[i], t0[i] + 2 * rho[i]),
            method="bounded",
            options={"xatol": 1e-12 * (1 + abs(t0[i]))},
        )
        out[i] = min(float(r.fun), float(rho[i]))
    return out


def tangent_line(model, curve: Curve, s0: float, h0: float = 1e-2, tol: float = 1e-8, max_halvings: int = 30) -> TangentFit:
    """Line through curve(s0) along the symmetric-secant base direction (oriented with s)."""
    p = curve(np.array(s0))
    B = model.base
    prev, change = None, math.inf
    h = h0
    for _ in range(max_halvings):
        w = B(curve(np.array(s0 + h))) - B(curve(np.array(s0 - h)))
        nw = np.linalg.norm(w)
        if nw == 0:
            raise NonConvergent("curve is vertical at s0; no horizontal tangent")
        w = w / nw
        if prev is not None:
            change = float(np.linalg.norm(w - prev))
            if change <= tol:
                break
        prev = w
        h /= 2
    else:
        raise NonConvergent(f"tangent direction still moving by {change:.3g}")
    line = model.line(p, w)
    offs = h0 * 0.5 ** np.arange(1, 8)
    Q = curve(s0 + offs)
    ratios = point_line_distance(model, line, Q) / model.dist(p, Q)
    return TangentFit(line, ratios, change)


def mu_distortion_margin(model, z_F, U, V) -> float:
    """min over pairs of |uv|^2 + delta(T)^2 - |mu(u) mu(v)|^2, T the base triangle (u, z_F, v)."""
    z_F = np.asarray(z_F, float)
    U, V = np.atleast_2d(U), np.atleast_2d(V)
    mu = lambda X: model.step(X, z_F - model.base(X))  # noqa: E731
    lhs = model.dist(mu(U), mu(V)) ** 2
    out = np.inf
    for u, v, l in zip(U, V, lhs):
        tri = BasePolygon(np.array([model.base(u), z_F, model.base(v)]))
        delta = lift_polygon(model, tri).displacement
        out = min(out, float(model.dist(u, v)) ** 2 + delta**2 - l)
    return float(out)


# ---------------------------------------------------------------------------
# quadratic excess


@dataclass
class ExcessReport:
    margin: float
    alpha: float
    alpha_at_y: float
    alpha_first_variation: float
    a: float
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray


def line_crossings(curve: Curve, line, n_grid: int = 2048) -> list[float]:
    return find_crossings(lambda th: line.offset(curve(th)), n_grid)


def quadratic_excess_check(model, curve: Curve, line, fractions: Sequence[float] | None = None, n_grid: int = 2048) -> ExcessReport:
    """min over t of 2 alpha t - (1 - alpha^2) t^2 / a - (b+(x_t) + b-(y_t)).

    x, y are the two points of curve on line, with the line running from y to
    x; x_t, y_t are the distance parameterizations on the arc from x to y in
    the curve's orientation.
    """
    roots = line_crossings(curve, line, n_grid)
    if len(roots) != 2:
        raise ParameterizationFailed(f"curve meets the line {len(roots)} times, expected 2")
    pts = curve(np.array(roots))
    tl, _ = line.foot(pts)
    ix = int(np.argmax(tl))
    th_x, th_y = roots[ix], roots[1 - ix]
    x, y = pts[ix], pts[1 - ix]
    a = float(model.dist(x, y))
    L = _arc(th_x, th_y)
    fractions = np.linspace(0.02, 0.9, 23) if fractions is None else np.asarray(fractions, float)
    ts = a * fractions

    dx = lambda th: model.dist(curve(th), x)  # noqa: E731
    dy = lambda th: model.dist(curve(th), y)  # noqa: E731
    xt = np.array([curve(np.array(_solve_on_arc(dx, t, th_x, L))) for t in ts])
    # walk backwards from y along the same arc
    dy_back = lambda s: dy(th_y - s)  # noqa: E731
    yt = np.array([curve(np.array(th_y - _solve_on_arc(dy_back, t, 0.0, L))) for t in ts])

    rev = line.reversed()
    bplus = busemann(model, rev, xt).value - busemann(model, rev, x[None, :]).value[0]
    bminus = busemann(model, line, yt).value - busemann(model, line, y[None, :]).value[0]
    lhs = bplus + bminus

    # alpha: slope of the tangent at x (oriented with the curve) w.r.t. the line
    # run towards y; at y the tangent points back along the arc
    lx = tangent_line(model, curve, th_x).line
    ly = tangent_line(model, curve, th_y).line.reversed()
    alpha = slope_estimate(model, lx, rev)
    alpha_y = slope_estimate(model, ly, line)
    # first variation: g(t) = |x_t y| has g'(0) = alpha
    h = 1e-4 * a
    gp = [float(model.dist(curve(np.array(_solve_on_arc(dx, s, th_x, L))), y)) for s in (h, 2 * h)]
    g1 = float((4 * (gp[0] - a) / h - (gp[1] - a) / (2 * h)) / 3)

    rhs = 2 * alpha * ts - (1 - alpha**2) * ts**2 / a
    return ExcessReport(float(np.min(rhs - lhs)), alpha, alpha_y, g1, a, ts, lhs, rhs)


def complex_line_check(model, curve: Curve, J: Callable[[np.ndarray], np.ndarray], z_F=None, n_grid: int = 2048) -> float:
    """Angle between J(radius direction) and the tangent direction at the radius line's crossings.

    The radius line is the horizontal line through the circle's center (midpoint
    of its fiber crossings) that meets the circle; J acts on base vectors.
    Returns the worst angle, taken modulo orientation.
    """
    rep = circle_diagnostics(model, curve, z_F, n_grid=n_grid, n_probe=1)
    o = rep.center
    bo = model.base(o)

    def height_offset(th):
        P = curve(th)
        return (model.fiber_coordinate(P) - model.fiber_coordinate(model.step(o, model.base(P) - bo)))[..., None]

    roots = find_crossings(height_offset, n_grid)
    if not roots:
        raise ParameterizationFailed("no horizontal line through the center meets the circle")
    worst = 0.0
    for th in roots:
        radius_dir = model.base(curve(np.array(th))) - bo
        t = tangent_line(model, curve, th).line.base_direction
        ang = angle_between(J(radius_dir), t)
        worst = max(worst, min(ang, math.pi - ang))
    return worst
