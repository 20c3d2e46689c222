"""Registry of seeded numerical checks with per-suite tolerances and JSON reports.

Each suite draws from its own RNG stream derived from (seed, tag), so reports
do not depend on execution order or thread scheduling.
"""

from __future__ import annotations

import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import geodesy as G
from .core import (
    INF,
    CrossRatioTriple,
    ExtendedPoint,
    classify_triple,
    cross_ratio,
    cross_ratio_batch,
    circle_residual,
    compose,
    m_invert,
    moebius_residual,
    ptolemy_scan,
    pullback,
)
from .errors import MoebiusError, UnknownSuite
from .euclidean import (
    chordal_metric,
    circle_through,
    euclid_inversion,
    euclidean_metric,
    euclidean_model,
    manhattan_metric,
    similarity,
)
from .heisenberg import (
    HeisElement,
    HeisModel,
    c_circle_through,
    commutator,
    complex_to_real,
    conj_flip,
    dilation,
    gauge,
    heis_model,
    inversion_at,
    koranyi_inversion,
    koranyi_pair,
    mul,
    pack,
    horizontal_line,
    r_circle_from_line,
    r_circle_through,
    random_unitary,
    real_to_complex,
    space_inversion,
    split,
    translation,
    unitary,
)

# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    k: int = 2
    samples: int | None = None  # overrides every suite's default sample count
    tolerances: dict = field(default_factory=dict)  # tag -> tol; key "*" applies to all
    depth: int = 12
    model: str = "heis"  # "heis" or "euclid"
    n: int = 3  # Euclidean dimension

    def tolerance(self, tag: str, default: float) -> float:
        return float(self.tolerances.get(tag, self.tolerances.get("*", default)))


@dataclass(frozen=True)
class SuiteReport:
    tag: str
    passed: bool
    worst_residual: float
    tol: float
    n: int
    runtime_ms: int
    model: str
    k: int
    witness: dict | None = None
    notes: dict | None = None

    def to_json(self, include_runtime: bool = True) -> dict:
        out = {
            "tag": self.tag,
            "pass": self.passed,
            "worst_residual": self.worst_residual,
            "tol": self.tol,
            "n": self.n,
            "model": self.model,
            "k": self.k,
            "witness": self.witness,
            "notes": self.notes,
        }
        if include_runtime:
            out["runtime_ms"] = self.runtime_ms
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SuiteReport":
        return cls(
            obj["tag"],
            bool(obj["pass"]),
            float(obj["worst_residual"]),
            float(obj["tol"]),
            int(obj["n"]),
            int(obj.get("runtime_ms", 0)),
            obj["model"],
            int(obj["k"]),
            obj.get("witness"),
            obj.get("notes"),
        )


@dataclass(frozen=True)
class Outcome:
    residual: float
    n: int
    witness: dict | None = None
    notes: dict | None = None


@dataclass(frozen=True)
class Suite:
    tag: str
    group: str  # exact | closed-form | limit | negative
    tol: float
    description: str
    fn: Callable[["Context"], Outcome] = field(repr=False)
    models: tuple[str, ...] = ("heis",)

    @property
    def anchor(self) -> str:
        return self.tag.split("/")[0]


@dataclass
class Context:
    cfg: SuiteConfig
    rng: np.random.Generator
    model: object

    def n(self, default: int) -> int:
        return int(self.cfg.samples) if self.cfg.samples is not None else default

    def count(self, default: int) -> int:
        """Sample count for expensive suites: never above the default."""
        return min(default, int(self.cfg.samples)) if self.cfg.samples is not None else default


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, ExtendedPoint):
        return x.to_json()
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# ---------------------------------------------------------------------------
# sampling helpers


def _unit(rng, d: int) -> np.ndarray:
    v = rng.normal(size=d)
    return v / np.linalg.norm(v)


def _J(w) -> np.ndarray:
    return complex_to_real(1j * real_to_complex(w))


def _rand_line(model, rng, spread: float = 1.0):
    return model.line(spread * model.sample(rng, 1)[0], _unit(rng, model.base_dim))


def _orthonormal(rng, d: int, count: int) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    return Q.T[:count]


def _rel(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _rand_r_circle(model: HeisModel, rng):
    """R-circle through two points of a random horizontal line; returns (circle, line)."""
    line = _rand_line(model, rng, 0.5)
    t1, t2 = np.sort(rng.uniform(-1.5, 1.5, size=2))
    if t2 - t1 < 0.3:
        t2 = t1 + 0.3
    a, b = line(np.array(t1)), line(np.array(t2))
    psi = inversion_at(a, 1.0)
    w = rng.normal(size=model.m) + 1j * rng.normal(size=model.m)
    c = psi.apply(mul(psi.apply(b), pack(w, 0.0)))
    return r_circle_through(a, b, c), line


@lru_cache(maxsize=64)
def _circles(seed: int, k: int, count: int):
    rng = np.random.default_rng([seed, zlib.crc32(b"circles"), k])
    model = heis_model(k)
    return model, [_rand_r_circle(model, rng) for _ in range(count)]


def _rand_fiber_circle(model: HeisModel, rng):
    """R-circle through two points of one fiber; returns (circle, base point of the fiber)."""
    zF = rng.normal(size=model.base_dim)
    h = rng.normal()
    s = rng.uniform(0.2, 2.0)
    x, y = model.fiber_point(zF, h - s), model.fiber_point(zF, h + s)
    psi = inversion_at(x, 1.0)
    zeta = real_to_complex(_unit(rng, model.base_dim))
    return r_circle_from_line(horizontal_line(psi.apply(y), zeta), psi), zF


@lru_cache(maxsize=64)
def _fiber_circles(seed: int, k: int, count: int):
    rng = np.random.default_rng([seed, zlib.crc32(b"fiber-circles"), k])
    model = heis_model(k)
    return model, [_rand_fiber_circle(model, rng) for _ in range(count)]


@lru_cache(maxsize=64)
def _diagnostics(seed: int, k: int, count: int):
    model, circles = _fiber_circles(seed, k, count)
    return [G.circle_diagnostics(model, c, zF) for c, zF in circles]


@lru_cache(maxsize=64)
def _recovered_J(k: int, u: tuple, scale: float = 1.0) -> tuple:
    return tuple(G.recover_J(heis_model(k), np.array(u), scale=scale))


def _model_maps(model, rng) -> dict:
    """Named Moebius maps of the model, including one composite space inversion."""
    if isinstance(model, HeisModel):
        m = model.m
        g = model.sample(rng, 1)[0]
        w1, w2 = model.sample(rng, 2)
        return {
            "translation": translation(g),
            "dilation": dilation(float(rng.uniform(0.3, 3.0))),
            "unitary": unitary(random_unitary(rng, m)),
            "conj_flip": conj_flip(),
            "koranyi_inversion": koranyi_inversion(m),
            "space_inversion": space_inversion(ExtendedPoint.finite(w1), ExtendedPoint.finite(w2), float(rng.uniform(0.5, 2.0))),
        }
    n = model.n
    c1, c2 = rng.normal(size=(2, n))
    R = _orthonormal(rng, n, n)
    return {
        "similarity": similarity(float(rng.uniform(0.3, 3.0)), R, rng.normal(size=n)),
        "inversion": euclid_inversion(c1, float(rng.uniform(0.5, 2.0))),
        "composite": compose(euclid_inversion(c1, 1.0), similarity(2.0, R, None), euclid_inversion(c2, 0.7)),
    }


def _inversion_about(model, center, r):
    if isinstance(model, HeisModel):
        return space_inversion(ExtendedPoint.finite(center), INF, r)
    return euclid_inversion(center, r)


def _sphere_points(model, rng, center, radius, size):
    """Points at distance ``radius`` from ``center``."""
    if isinstance(model, HeisModel):
        Y = model.sample(rng, size)
        z, h = split(Y)
        s = radius / gauge(Y)
        return mul(center, pack(s[:, None] * z, s * s * h))
    D = rng.normal(size=(size, model.n))
    return center + radius * D / np.linalg.norm(D, axis=1, keepdims=True)


def _quads(model, rng, n):
    return model.sample(rng, 4 * n).reshape(n, 4, -1)


# ---------------------------------------------------------------------------
# core suites


def _pt_eq_circles(ctx: Context) -> Outcome:
    rng, worst, wit = ctx.rng, 0.0, None
    model = euclidean_model(max(2, ctx.cfg.n))
    count = ctx.count(40)
    for i in range(count):
        P = rng.normal(size=(3, model.n))
        if i % 8 == 0:
            # a line through infinity
            circ = circle_through(P[0], P[1], INF)
        else:
            circ = circle_through(*P)
        pts = circ.sample(8)
        res = circle_residual(model.metric, pts)
        if res > worst:
            worst, wit = res, {"points": [p.to_json() for p in pts]}
    return Outcome(worst, count, wit)


def _ptolemy_scan(ctx: Context) -> Outcome:
    rep = ptolemy_scan(ctx.model.metric, ctx.model.sample, ctx.n(100_000), ctx.rng)
    return Outcome(max(0.0, -rep.min_slack), rep.n, {"worst": rep.worst}, {"counts": rep.counts, "min_slack": rep.min_slack})


def _l1_negative(ctx: Context) -> Outcome:
    d = manhattan_metric(2)
    rep = ptolemy_scan(d, lambda r, s: r.normal(size=(s, 2)), ctx.n(10_000), ctx.rng)
    return Outcome(max(0.0, rep.min_slack + 1e-6), rep.n, {"worst": rep.worst}, {"min_slack": rep.min_slack})


def _chordal_equivalence(ctx: Context) -> Outcome:
    n = ctx.cfg.n
    de, dc = euclidean_metric(n), chordal_metric(n)
    N = ctx.n(2000)
    Q = ctx.rng.normal(size=(N, 4, n))
    A = cross_ratio_batch(de, *(Q[:, i] for i in range(4)))
    B = cross_ratio_batch(dc, *(Q[:, i] for i in range(4)))
    worst = float(np.max(np.abs(A - B)))
    # quadruples containing infinity go through the scalar conventions
    for i in range(min(N, 50)):
        pts = [ExtendedPoint.finite(p) for p in Q[i, :3]] + [INF]
        worst = max(worst, cross_ratio(de, pts).distance(cross_ratio(dc, pts)))
    return Outcome(worst, N + min(N, 50))


def _m_inversion_equivalence(ctx: Context) -> Outcome:
    d = ctx.model.metric
    N = ctx.n(5000)
    z = ctx.model.sample(ctx.rng, 1)[0]
    dz = m_invert(d, ExtendedPoint.finite(z), float(ctx.rng.uniform(0.5, 2.0)))
    Q = _quads(ctx.model, ctx.rng, N)
    A = cross_ratio_batch(d, *(Q[:, i] for i in range(4)))
    B = cross_ratio_batch(dz, *(Q[:, i] for i in range(4)))
    err = np.max(np.abs(A - B), axis=-1)
    i = int(np.argmax(err))
    return Outcome(float(err[i]), N, {"quadruple": Q[i]})


def _m_inversion_involution(ctx: Context) -> Outcome:
    d = ctx.model.metric
    N = ctx.n(5000)
    z = ExtendedPoint.finite(ctx.model.sample(ctx.rng, 1)[0])
    back = m_invert(m_invert(d, z, 1.0), INF, 1.0)
    X, Y = ctx.model.sample(ctx.rng, N), ctx.model.sample(ctx.rng, N)
    return Outcome(_rel(back.pair(X, Y), d.pair(X, Y)), N)


def _crt_conventions(ctx: Context) -> Outcome:
    d = ctx.model.metric
    N = ctx.n(2000)
    Q = _quads(ctx.model, ctx.rng, N)
    X, Y, Z, U = (Q[:, i] for i in range(4))
    A = cross_ratio_batch(d, X, Y, Z, U)
    worst = float(np.max(np.abs(cross_ratio_batch(d, Y, X, Z, U) - A[:, [0, 2, 1]])))
    worst = max(worst, float(np.max(np.abs(cross_ratio_batch(d, X, Z, Y, U) - A[:, [1, 0, 2]]))))
    for i in range(min(N, 20)):
        x, y, z = (ExtendedPoint.finite(p) for p in Q[i, :3])
        two = cross_ratio(d, [x, y, INF, INF]).as_tuple()
        worst = max(worst, float(np.max(np.abs(np.array(two) - (0.0, 0.5, 0.5)))))
        one = cross_ratio(d, [x, y, z, INF]).as_tuple()
        expect = np.array([d(x, y), d(x, z), d(y, z)])
        worst = max(worst, float(np.max(np.abs(np.array(one) - expect / expect.sum()))))
        t = CrossRatioTriple.normalized(*A[i])
        perm = CrossRatioTriple.normalized(A[i, 2], A[i, 0], A[i, 1])
        if classify_triple(t).tag != classify_triple(perm).tag:
            worst = math.inf
    return Outcome(worst, N)


def _sinversion_minversion(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    d = model.metric
    N = ctx.n(10_000)
    worst = 0.0
    cases = [(model.origin, 1.0)] + [(model.sample(rng, 1)[0], float(rng.uniform(0.5, 2.0))) for _ in range(2)]
    for center, r in cases:
        if isinstance(model, HeisModel) and not np.any(center):
            f = koranyi_inversion(model.m)
        else:
            f = _inversion_about(model, center, r)
        pulled = pullback(d, f)
        target = m_invert(d, ExtendedPoint.finite(center), r)
        X, Y = model.sample(rng, N), model.sample(rng, N)
        worst = max(worst, _rel(pulled.pair(X, Y), target.pair(X, Y)))
    return Outcome(worst, N * len(cases))


def _sphere_sinversion(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.n(2000)
    worst = 0.0
    for r, rp in [(1.0, 2.0), (float(rng.uniform(0.5, 2)), float(rng.uniform(0.5, 3)))]:
        center = model.sample(rng, 1)[0]
        f = _inversion_about(model, center, r)
        S = _sphere_points(model, rng, center, rp, N)
        img = f.apply(S)
        worst = max(worst, _rel(model.dist(center, img), np.full(N, r * r / rp)))
    return Outcome(worst, 2 * N)


def _moebius_invariance(ctx: Context) -> Outcome:
    N = ctx.n(1000)
    notes, worst, wit = {}, 0.0, None
    for name, f in _model_maps(ctx.model, ctx.rng).items():
        res = moebius_residual(ctx.model.metric, f, _quads(ctx.model, ctx.rng, N))
        notes[name] = res
        if res >= worst:
            worst, wit = res, {"map": name}
    return Outcome(worst, N * len(notes), wit, notes)


def _space_inversion_involution(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.n(2000)
    w1, w2 = model.sample(rng, 2)
    r = float(rng.uniform(0.5, 2.0))
    if isinstance(model, HeisModel):
        phi = space_inversion(ExtendedPoint.finite(w1), ExtendedPoint.finite(w2), r)
    else:
        phi = euclid_inversion(w1, r)
    X = model.sample(rng, N)
    # coordinate errors: the gauge turns a height error e into a distance 2 sqrt(e)
    size = 1 + np.linalg.norm(X, axis=-1)
    back = phi.apply(phi.apply(X))
    worst = float(np.max(np.linalg.norm(back - X, axis=-1) / size))
    moved = float(np.min(model.dist(phi.apply(X), X) / size))
    notes = {"min_displacement": moved}
    if isinstance(model, HeisModel):
        # swaps the poles, and the Koranyi inversion keeps lines through the origin
        img1, img2 = phi(ExtendedPoint.finite(w1)).array, phi(ExtendedPoint.finite(w2)).array
        swap = max(float(np.linalg.norm(img1 - w2)), float(np.linalg.norm(img2 - w1)))
        worst = max(worst, swap / (1 + max(np.linalg.norm(w1), np.linalg.norm(w2))))
        iota = koranyi_inversion(model.m)
        line = model.line(model.origin, _unit(rng, model.base_dim))
        t = rng.uniform(-3, 3, size=N)
        img = iota.apply(line(t))
        off = np.linalg.norm(line.offset(img), axis=-1) / (1 + np.linalg.norm(img, axis=-1))
        worst = max(worst, float(np.max(off)))
    if moved <= 1e-9:
        worst = math.inf
    return Outcome(worst, N, None, notes)


# ---------------------------------------------------------------------------
# Heisenberg algebra and metric


def _associativity(ctx: Context) -> Outcome:
    N = ctx.n(10_000)
    A, B, C = (ctx.model.sample(ctx.rng, N) for _ in range(3))
    err = np.max(np.abs(mul(mul(A, B), C) - mul(A, mul(B, C))), axis=-1)
    i = int(np.argmax(err))
    return Outcome(float(err[i]), N, {"triple": [A[i], B[i], C[i]]})


def _inverse_law(ctx: Context) -> Outcome:
    N = ctx.n(10_000)
    A = ctx.model.sample(ctx.rng, N)
    return Outcome(float(np.max(np.abs(mul(A, -A))) + np.max(np.abs(mul(-A, A)))), N)


def _center(ctx: Context) -> Outcome:
    N = ctx.n(2000)
    model = ctx.model
    A, B = model.sample(ctx.rng, N), model.sample(ctx.rng, N)
    comm = mul(mul(A, B), mul(-A, -B))
    worst = float(np.max(np.abs(model.base(comm))))
    Z = np.zeros_like(A)
    Z[:, -1] = ctx.rng.normal(size=N)
    worst = max(worst, float(np.max(np.abs(mul(Z, A) - mul(A, Z)))))
    e = np.zeros(model.m, complex)
    e1, ie1 = e.copy(), e.copy()
    e1[0], ie1[0] = 1, 1j
    c = commutator(HeisElement(tuple(e1), 0.0), HeisElement(tuple(ie1), 0.0))
    worst = max(worst, float(np.max(np.abs(c.packed - pack(e, 1.0)))))
    return Outcome(worst, N)


def _koranyi_gauge(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.n(10_000)
    X, Y, Gs = (model.sample(rng, N) for _ in range(3))
    d = model.dist(X, Y)
    worst = _rel(model.dist(mul(Gs, X), mul(Gs, Y)), d)
    worst = max(worst, _rel(gauge(mul(-X, Y)), d), _rel(model.dist(Y, X), d))
    lam = 3.0
    z, h = split(X)
    worst = max(worst, _rel(gauge(pack(lam * z, lam * lam * h)), lam * gauge(X)))
    return Outcome(worst, N)


def _triangle(ctx: Context) -> Outcome:
    N = ctx.n(100_000)
    X, Y, Z = (ctx.model.sample(ctx.rng, N) for _ in range(3))
    dxz = ctx.model.dist(X, Z)
    slack = (ctx.model.dist(X, Y) + ctx.model.dist(Y, Z) - dxz) / dxz
    return Outcome(max(0.0, -float(np.min(slack))), N)


def _pi_submetry(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.n(10_000)
    X, Y = model.sample(rng, N), model.sample(rng, N)
    d = model.dist(X, Y)
    base = np.linalg.norm(model.base(X) - model.base(Y), axis=-1)
    worst = max(0.0, float(np.max((base - d) / d)))
    line = _rand_line(model, rng)
    s = rng.uniform(-5, 5, size=N)
    t = s + rng.choice([-1, 1], size=N) * rng.uniform(0.1, 5, size=N)
    worst = max(worst, _rel(model.dist(line(s), line(t)), np.abs(s - t)))
    bl = np.linalg.norm(model.base(line(s)) - model.base(line(t)), axis=-1)
    worst = max(worst, _rel(bl, np.abs(s - t)))
    if isinstance(model, HeisModel):
        # in coordinates the line is g (t zeta, 0): the height of g^-1 line(t) vanishes
        worst = max(worst, float(np.max(np.abs(model.fiber_coordinate(mul(-line.g, line(s)))))))
    return Outcome(worst, N)


def _vert_flip(ctx: Context) -> Outcome:
    N = ctx.n(1000)
    j = conj_flip()
    X, Y = ctx.model.sample(ctx.rng, N), ctx.model.sample(ctx.rng, N)
    jX, jY = j.apply(X), j.apply(Y)
    worst = float(np.max(np.abs(j.apply(jX) - X)))
    worst = max(worst, float(np.max(np.abs(ctx.model.dist(jX, jY) - ctx.model.dist(X, Y)))))
    real_line = ctx.model.line(ctx.model.origin, np.eye(ctx.model.base_dim)[0])
    P = real_line(ctx.rng.uniform(-5, 5, size=N))
    worst = max(worst, float(np.max(np.abs(j.apply(P) - P))))
    return Outcome(worst, N)


def _fiber_pythagoras(ctx: Context) -> Outcome:
    N = ctx.n(1000)
    model = ctx.model
    zF = model.base(model.sample(ctx.rng, 1)[0])
    H = ctx.rng.normal(scale=2.0, size=(N, 3))
    return Outcome(G.fiber_pythagoras_residual(model, zF, H), N)


def _fiber_distance(ctx: Context) -> Outcome:
    N = ctx.n(1000)
    model = ctx.model
    zF = model.base(model.sample(ctx.rng, 1)[0])
    h1, h2 = ctx.rng.normal(scale=2.0, size=(2, N))
    d = model.dist(model.fiber_point(zF, h1), model.fiber_point(zF, h2))
    return Outcome(_rel(d, 2 * np.sqrt(np.abs(h1 - h2))), N)


def _distance_formula(ctx: Context) -> Outcome:
    """Distance with the lifting-constant term c^2/8 <Jz, z'> at c = 2 against the gauge."""
    N = ctx.n(10_000)
    X, Y = ctx.model.sample(ctx.rng, N), ctx.model.sample(ctx.rng, N)
    zx, hx = split(X)
    zy, hy = split(Y)
    c = 2.0
    Jz_dot = np.sum(complex_to_real(1j * zx) * complex_to_real(zy), axis=-1)
    a = np.linalg.norm(complex_to_real(zx - zy), axis=-1)
    b = 2 * np.sqrt(np.abs(hx - hy + c * c / 8 * Jz_dot))
    D = (a**4 + b**4) ** 0.25
    return Outcome(_rel(D, koranyi_pair(X, Y)), N)


def _multi_law(ctx: Context) -> Outcome:
    model = ctx.model
    N = ctx.count(300)
    worst = 0.0
    for _ in range(N):
        z, zp = model.base(model.sample(ctx.rng, 2))
        lift = G.lift_polygon(model, G.BasePolygon(np.array([np.zeros_like(z), z, z + zp])))
        hol = float(model.fiber_coordinate(lift.end))
        prod = mul(model.fiber_point(z, 0.0), model.fiber_point(zp, 0.0))
        worst = max(worst, abs(float(model.fiber_coordinate(prod)) - hol))
    return Outcome(worst, N)


def _d_law(ctx: Context) -> Outcome:
    N = ctx.n(10_000)
    X, Y = ctx.model.sample(ctx.rng, N), ctx.model.sample(ctx.rng, N)
    return Outcome(G.d_law_residual(ctx.model, X, Y), N)


def _d_homogeneous(ctx: Context) -> Outcome:
    N = ctx.n(2000)
    model = ctx.model
    X, Y = model.sample(ctx.rng, N), model.sample(ctx.rng, N)
    lam = float(ctx.rng.uniform(0.2, 5.0))
    delta = dilation(lam)
    a, b = G.dist_components(model, X, Y)
    a2, b2 = G.dist_components(model, delta.apply(X), delta.apply(Y))
    D = lambda a, b: (a**4 + b**4) ** 0.25  # noqa: E731
    worst = max(_rel(a2, lam * a), _rel(b2, lam * b), _rel(D(a2, b2), lam * D(a, b)))
    return Outcome(worst, N)


# ---------------------------------------------------------------------------
# Busemann functions and slopes


def _busemann_closed_form(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.n(100)
    line = _rand_line(model, rng)
    X = model.sample(rng, N)
    b = G.busemann(model, line, X).value
    w = model.base(mul(-line.g, X)) if isinstance(model, HeisModel) else X - line.point
    exact = -(w @ line.base_direction)
    return Outcome(float(np.max(np.abs(b - exact))), N)


def _busemann_flat(ctx: Context) -> Outcome:
    N = ctx.n(100)
    line = _rand_line(ctx.model, ctx.rng)
    X = ctx.model.sample(ctx.rng, N)
    res = G.busemann_flat_residual(ctx.model, line, X)
    on_line = G.busemann_flat_residual(ctx.model, line, line(ctx.rng.uniform(-3, 3, size=10)))
    return Outcome(max(res, on_line), N + 10)


def _duality(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.count(20)
    line = _rand_line(model, rng)
    worst = 0.0
    for x in model.sample(rng, N):
        worst = max(worst, float(G.duality_residual(model, line, x).value))
    # on the circle itself: b+(c(t)) = -1/t and b-(c(t)) = 1/t
    t = rng.uniform(0.2, 2.0, size=10)
    on = line(1 / t)
    o = line(np.zeros(1))
    bp = G.busemann(model, line, on).value - G.busemann(model, line, o).value[0]
    bm = G.busemann(model, line.reversed(), on).value - G.busemann(model, line.reversed(), o).value[0]
    worst = max(worst, float(np.max(np.abs(bp + 1 / t))), float(np.max(np.abs(bm - 1 / t))))
    return Outcome(worst, N + 10)


def _busemann_affine(ctx: Context) -> Outcome:
    N = ctx.count(30)
    worst = 0.0
    for _ in range(N):
        l, lp = _rand_line(ctx.model, ctx.rng), _rand_line(ctx.model, ctx.rng)
        worst = max(worst, G.slope_fit(ctx.model, lp, l, tol=math.inf).affinity_residual)
    return Outcome(worst, N)


def _slope_symmetry(ctx: Context) -> Outcome:
    N = ctx.count(50)
    worst = 0.0
    for _ in range(N):
        l, lp = _rand_line(ctx.model, ctx.rng), _rand_line(ctx.model, ctx.rng)
        worst = max(worst, G.slope_symmetry_residual(ctx.model, l, lp))
    return Outcome(worst, N)


def _slope_self(ctx: Context) -> Outcome:
    N = ctx.count(20)
    worst = 0.0
    for _ in range(N):
        l = _rand_line(ctx.model, ctx.rng)
        worst = max(worst, abs(G.slope_estimate(ctx.model, l, l) + 1))
    return Outcome(worst, N)


def _slope_closed_form(ctx: Context) -> Outcome:
    N = ctx.count(30)
    worst = 0.0
    for _ in range(N):
        l, lp = _rand_line(ctx.model, ctx.rng), _rand_line(ctx.model, ctx.rng)
        exact = -float(lp.base_direction @ l.base_direction)
        worst = max(worst, abs(G.slope_estimate(ctx.model, lp, l) - exact))
    return Outcome(worst, N)


def _slope_orientation(ctx: Context) -> Outcome:
    N = ctx.count(30)
    worst = 0.0
    for _ in range(N):
        l, lp = _rand_line(ctx.model, ctx.rng), _rand_line(ctx.model, ctx.rng)
        s = G.slope_estimate(ctx.model, lp, l)
        s_rev = G.slope_estimate(ctx.model, lp.reversed(), l)
        worst = max(worst, abs(s + s_rev), max(0.0, abs(s) - 1 - 1e-9))
    return Outcome(worst, N)


# ---------------------------------------------------------------------------
# zigzag curves


def _zigzag_affinity(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    m = min(3, model.base_dim)
    dirs = np.array([_unit(rng, model.base_dim) for _ in range(m)])
    steps = rng.uniform(0.2, 1.0, size=m)
    line = _rand_line(model, rng)
    alphas = [G.slope_estimate(model, model.line(model.origin, e), line) for e in dirs]
    p = ctx.cfg.depth
    dev, beta = G.zigzag_affinity(model, G.ZigzagSpec(model.origin, dirs, steps, p), line, alphas)
    dev_prev, _ = G.zigzag_affinity(model, G.ZigzagSpec(model.origin, dirs, steps, p - 1), line, alphas)
    ratio = dev / dev_prev if dev_prev > 0 else 0.0
    notes = {"beta": beta, "halving_ratio": ratio, "previous_depth_deviation": dev_prev}
    worst = dev if ratio <= 0.5 + 1e-3 else math.inf
    return Outcome(worst, 2, None, notes)


def _orthogonal_frame(model, rng, count):
    return _orthonormal(rng, model.base_dim, count)


def _zigzag_speed(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    worst, notes = 0.0, {}
    for m in sorted({1, 2, min(3, model.base_dim)}):
        if m > model.base_dim:
            continue
        dirs = _orthogonal_frame(model, rng, m)
        steps = rng.uniform(0.2, 1.0, size=m)
        spec = G.ZigzagSpec(model.origin, dirs, steps, ctx.cfg.depth)
        speed = G.endpoint_speed(model, G.zigzag(model, spec), float(steps.sum()))
        expected = float(np.sqrt(np.sum(steps**2)) / steps.sum())
        notes[f"frame_{m}"] = {"speed": speed, "expected": expected}
        worst = max(worst, abs(speed - expected))
    return Outcome(worst, len(notes), None, notes)


def _zigzag_cauchy(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    m = min(2, model.base_dim)
    dirs = _orthogonal_frame(model, rng, m)
    steps = rng.uniform(0.2, 1.0, size=m)
    p = ctx.cfg.depth
    g1 = G.zigzag_cauchy_gap(model, G.ZigzagSpec(model.origin, dirs, steps, p - 1))
    g2 = G.zigzag_cauchy_gap(model, G.ZigzagSpec(model.origin, dirs, steps, p))
    ratio = g2 / g1 if g1 > 0 else 0.0
    return Outcome(ratio, 2, None, {"gap": g2, "previous_gap": g1})


def _max_frame(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.count(5)
    worst = 0.0
    for _ in range(N):
        frame = [model.line(model.origin, e) for e in _orthogonal_frame(model, rng, model.base_dim)]
        line = model.line(model.origin, _unit(rng, model.base_dim))
        o = G.orthogonalize(model, frame, line)
        worst = max(worst, abs(o.sum_sq - 1))
    return Outcome(worst, N)


def _orthogonalization(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    if model.base_dim < 2:
        return Outcome(0.0, 0)
    N = ctx.count(3)
    worst, notes = 0.0, {}
    for i in range(N):
        Q = _orthogonal_frame(model, rng, model.base_dim)
        frame = [model.line(model.origin, e) for e in Q[:-1]]
        # keep a definite component outside the frame so the zigzag cannot degenerate
        direction = rng.normal(size=len(Q) - 1) @ Q[:-1] + rng.uniform(0.5, 1.0) * Q[-1]
        line = model.line(model.origin, direction / np.linalg.norm(direction))
        o = G.orthogonalize(model, frame, line)
        if o.degenerate:
            worst = math.inf
        spec = G.ZigzagSpec(model.origin, o.directions, o.steps, ctx.cfg.depth)
        curve = G.zigzag(model, spec)
        for li in frame:
            b = G.busemann(model, li, curve.vertices[[0, -1]]).value
            beta = (b[1] - b[0]) / (curve.params[-1] - curve.params[0])
            worst = max(worst, abs(float(beta)))
        notes[f"sum_sq_{i}"] = o.sum_sq
    return Outcome(worst, N, None, notes)


# ---------------------------------------------------------------------------
# lifting polygons and the complex structure


def _lift_const(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    u = _unit(rng, model.base_dim)
    rects = [(float(a), float(b), rng.normal(size=model.base_dim)) for a, b in rng.uniform(0.1, 3.0, size=(ctx.count(24), 2))]
    fit = G.area_law_fit(model, u, _J(u), rects)
    return Outcome(abs(fit.c - 2), len(rects), None, {"c": fit.c, "r2": fit.r2})


def _real_plane(ctx: Context) -> Outcome:
    model = heis_model(max(3, ctx.cfg.k))
    rng = ctx.rng
    u = _unit(rng, model.base_dim)
    v = rng.normal(size=model.base_dim)
    for e in (u, _J(u)):
        v = v - (v @ e) * e
    v = v / np.linalg.norm(v)
    rects = [(float(a), float(b)) for a, b in rng.uniform(0.1, 3.0, size=(ctx.count(20), 2))]
    fit = G.area_law_fit(model, u, v, rects)
    return Outcome(fit.c, len(rects), None, {"k": model.k})


def _area_law(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    u = _unit(rng, model.base_dim)
    v = rng.normal(size=model.base_dim)
    v = v - (v @ u) * u
    v = v / np.linalg.norm(v)
    rects = [(float(a), float(b), rng.normal(size=model.base_dim)) for a, b in rng.uniform(0.1, 3.0, size=(ctx.count(20), 2))]
    fit = G.area_law_fit(model, u, v, rects)
    expected = 2 * math.sqrt(abs(float(_J(u) @ v)))
    return Outcome(max(1 - fit.r2, abs(fit.c - expected)), len(rects), None, {"c": fit.c, "expected": expected})


def _adding_lifts(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.count(100)
    worst = 0.0
    for _ in range(N):
        A, B, C, D = rng.normal(size=(4, model.base_dim))
        start = model.fiber_point(A, float(rng.normal()))
        Q = G.lift_polygon(model, G.BasePolygon(np.array([A, B, C, D])), start)
        P1 = G.lift_polygon(model, G.BasePolygon(np.array([A, B, C])), start)
        P2 = G.lift_polygon(model, G.BasePolygon(np.array([A, C, D])), P1.end)
        worst = max(worst, float(np.max(np.abs(Q.end - P2.end))), Q.base_residual)
    return Outcome(worst, N)


def _unit_square(ctx: Context) -> Outcome:
    model = ctx.model
    N = ctx.count(20)
    worst = 0.0
    for _ in range(N):
        u = _unit(ctx.rng, model.base_dim)
        sq = G.rectangle(u, _J(u), corner=ctx.rng.normal(size=model.base_dim))
        worst = max(worst, abs(G.lift_polygon(model, sq).displacement - 2))
    return Outcome(worst, N)


def _linear_functional(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.count(20)
    worst = 0.0
    e1 = np.eye(model.base_dim)[0]
    worst = abs(G.xi(model, e1, _J(e1)) - 4)
    for _ in range(N):
        u = _unit(rng, model.base_dim)
        v, w = rng.normal(size=(2, model.base_dim))
        v, w = v - (v @ u) * u, w - (w @ u) * u
        xv = G.xi(model, u, v, tol=1e-9)
        worst = max(worst, abs(G.xi(model, u, -2 * v, tol=1e-9) + 2 * xv) / max(1.0, abs(xv)))
        xs = G.xi(model, u, v + w, tol=1e-9)
        worst = max(worst, abs(xs - xv - G.xi(model, u, w, tol=1e-9)) / max(1.0, abs(xs)))
    return Outcome(worst, N)


def _J_cases(ctx: Context, count: int):
    model = ctx.model
    us = [np.eye(model.base_dim)[0]] + [_unit(ctx.rng, model.base_dim) for _ in range(count - 1)]
    return model, [(u, np.array(_recovered_J(model.k, tuple(u)))) for u in us]


def _J_equals_i(ctx: Context) -> Outcome:
    model, cases = _J_cases(ctx, ctx.count(2))
    worst = max(G.angle_between(v, _J(u)) for u, v in cases)
    orth = max(abs(float(u @ v)) for u, v in cases)
    return Outcome(max(worst, orth if orth > 1e-9 else 0.0), len(cases), None, {"orthogonality": orth})


def _J_squared(ctx: Context) -> Outcome:
    model, cases = _J_cases(ctx, ctx.count(2))
    worst = 0.0
    for u, v in cases:
        jj = np.array(_recovered_J(model.k, tuple(v)))
        worst = max(worst, G.angle_between(jj, -u))
    return Outcome(worst, len(cases))


def _J_equivariance(ctx: Context) -> Outcome:
    """Recovered J commutes with a unitary map and is unchanged by dilation."""
    model, cases = _J_cases(ctx, 1)
    u, v = cases[0]
    U = random_unitary(ctx.rng, model.m)
    Uc = lambda w: complex_to_real(U @ real_to_complex(w))  # noqa: E731
    Uu = Uc(u)
    v_rot = np.array(_recovered_J(model.k, tuple(Uu)))
    v_dil = np.array(_recovered_J(model.k, tuple(u), 2.0))
    notes = {"unitary": G.angle_between(v_rot, Uc(v)), "dilation": G.angle_between(v_dil, v)}
    return Outcome(max(notes.values()), 2, None, notes)


def _xi_norm(ctx: Context) -> Outcome:
    model, cases = _J_cases(ctx, ctx.count(2))
    worst = max(abs(abs(G.xi(model, u, v, tol=1e-6)) - 4) for u, v in cases)
    return Outcome(worst, len(cases))


# ---------------------------------------------------------------------------
# R-circles


def _circle_count(ctx: Context) -> int:
    return ctx.count(3)


def _diag_field(name: str):
    def run(ctx: Context) -> Outcome:
        reps = _diagnostics(ctx.cfg.seed, ctx.cfg.k, _circle_count(ctx))
        vals = [getattr(r, name) for r in reps]
        if isinstance(vals[0], bool):
            return Outcome(0.0 if all(vals) else 1.0, len(vals))
        return Outcome(float(max(vals)), len(vals))

    return run


def _r_circle_ptolemy(ctx: Context) -> Outcome:
    model, circles = _circles(ctx.cfg.seed, ctx.cfg.k, _circle_count(ctx))
    worst = 0.0
    for c, _ in circles:
        P = c(c.angles(10) + 0.1)
        worst = max(worst, circle_residual(model.metric, [ExtendedPoint.finite(p) for p in P]))
    return Outcome(worst, len(circles))


def _c_circles(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.count(10)
    worst, min_defect = 0.0, math.inf
    for _ in range(N):
        p, q = model.sample(rng, 2)
        C = c_circle_through(ExtendedPoint.finite(p), ExtendedPoint.finite(q))
        # coordinates, not the gauge: a height error e shows up as 2 sqrt(e) in distance
        worst = max(worst, _rel(C(np.array(0.0)), p), _rel(C(np.array(-math.pi)), q))
        pts = [ExtendedPoint.finite(x) for x in C(C.angles(8) + 0.1)]
        min_defect = min(min_defect, circle_residual(model.metric, pts))
    return Outcome(worst, N, None, {"min_ptolemy_defect": min_defect})


def _c_circle_negative(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.count(10)
    defects = []
    for _ in range(N):
        p, q = model.sample(rng, 2)
        C = c_circle_through(ExtendedPoint.finite(p), ExtendedPoint.finite(q))
        pts = [ExtendedPoint.finite(x) for x in C(C.angles(8) + 0.1)]
        defects.append(circle_residual(model.metric, pts))
    return Outcome(max(0.0, 1e-3 - min(defects)), N, None, {"min_ptolemy_defect": min(defects)})


def _quadratic_excess(ctx: Context) -> Outcome:
    model, circles = _circles(ctx.cfg.seed, ctx.cfg.k, _circle_count(ctx))
    worst, notes = 0.0, {}
    for i, (c, line) in enumerate(circles):
        for name, curve in (("forward", c), ("backward", lambda th, c=c: c(-np.asarray(th)))):
            rep = G.quadratic_excess_check(model, curve, line)
            worst = max(worst, -rep.margin)
            notes[f"{i}_{name}"] = {"margin": rep.margin, "alpha": rep.alpha}
    return Outcome(max(0.0, worst), 2 * len(circles), None, notes)


def _first_variation(ctx: Context) -> Outcome:
    """Slope of the tangent at x equals the first variation of the distance to y;
    the slope read at y is reported alongside and disagreements are flagged."""
    model, circles = _circles(ctx.cfg.seed, ctx.cfg.k, _circle_count(ctx))
    worst, notes = 0.0, {}
    for i, (c, line) in enumerate(circles):
        rep = G.quadratic_excess_check(model, c, line)
        worst = max(worst, abs(rep.alpha - rep.alpha_first_variation))
        notes[str(i)] = {
            "alpha_x": rep.alpha,
            "alpha_y": rep.alpha_at_y,
            "first_variation": rep.alpha_first_variation,
            "endpoint_slopes_disagree": bool(abs(rep.alpha - rep.alpha_at_y) > 1e-3),
        }
    return Outcome(worst, len(circles), None, notes)


def _complex_line(ctx: Context) -> Outcome:
    model, circles = _fiber_circles(ctx.cfg.seed, ctx.cfg.k, _circle_count(ctx))
    worst = max(G.complex_line_check(model, c, _J, zF) for c, zF in circles)
    return Outcome(worst, len(circles))


def _mu_distortion(ctx: Context) -> Outcome:
    model, rng = ctx.model, ctx.rng
    N = ctx.count(300)
    U, V = model.sample(rng, N), model.sample(rng, N)
    zF = model.base(model.sample(rng, 1)[0])
    margin = G.mu_distortion_margin(model, zF, U, V)
    scale = float(np.max(model.dist(U, V)) ** 2)
    return Outcome(max(0.0, -margin / scale), N, None, {"margin": margin})


def _rectifiable(ctx: Context) -> Outcome:
    model, circles = _circles(ctx.cfg.seed, ctx.cfg.k, _circle_count(ctx))
    worst, notes = 0.0, {}
    for i, (c, _) in enumerate(circles):
        th0 = float(ctx.rng.uniform(-3, 3))
        chords, defects, slope = G.rectifiability_exponent(model, c, th0, [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125])
        q = defects / chords**2
        worst = max(worst, float(q[-1] / q[0]))
        notes[str(i)] = {"exponent": slope}
    return Outcome(worst, len(circles), None, notes)


def _tangent(ctx: Context) -> Outcome:
    model, circles = _circles(ctx.cfg.seed, ctx.cfg.k, _circle_count(ctx))
    worst = 0.0
    for c, _ in circles:
        fit = G.tangent_line(model, c, float(ctx.rng.uniform(-3, 3)))
        worst = max(worst, fit.decay)
    return Outcome(worst, len(circles))


# ---------------------------------------------------------------------------
# registry

BOTH = ("heis", "euclid")

SUITES: dict[str, Suite] = {
    s.tag: s
    for s in [
        # cross ratios, Moebius structure, inversions
        Suite("eq:PT_eq/euclidean-circles", "closed-form", 1e-12, "Ptolemy equality on round circles and lines of R^n", _pt_eq_circles, BOTH),
        Suite("pro:moeb_ptolemy/scan", "closed-form", 1e-12, "random quadruples never violate the Ptolemy inequality (relative slack)", _ptolemy_scan, BOTH),
        Suite("negative:L1-not-ptolemy", "negative", 0.0, "the L1 plane violates the Ptolemy inequality somewhere in the sample", _l1_negative, BOTH),
        Suite("def:moebius_equivalence/chordal", "closed-form", 1e-10, "chordal and Euclidean metrics share all cross-ratio triples", _chordal_equivalence, BOTH),
        Suite("def:m_inversion/equivalence", "closed-form", 1e-12, "metric inversion keeps every cross-ratio triple", _m_inversion_equivalence, BOTH),
        Suite("def:m_inversion/involution", "closed-form", 1e-12, "inverting at z and then at the old remote point restores the metric", _m_inversion_involution, BOTH),
        Suite("def:crt/conventions", "closed-form", 1e-12, "entry permutations, one and two remote points, class invariance", _crt_conventions, BOTH),
        Suite("lem:sinversion_minversion", "closed-form", 1e-10, "pullback under a space inversion equals the metric inversion", _sinversion_minversion, BOTH),
        Suite("lem:sphere_sinversion", "closed-form", 1e-10, "space inversion sends the r'-sphere to the r^2/r'-sphere", _sphere_sinversion, BOTH),
        Suite("def:moebius/invariance", "closed-form", 1e-9, "model maps preserve cross-ratio triples", _moebius_invariance, BOTH),
        Suite("subsect:space_inversions/involution", "closed-form", 1e-9, "space inversions are fixed-point-free involutions swapping the poles", _space_inversion_involution, BOTH),
        # Heisenberg group and gauge
        Suite("lem:mult_hermitian/associativity", "exact", 1e-12, "the Hermitian group law is associative", _associativity),
        Suite("lem:mult_hermitian/inverse", "exact", 0.0, "negation is the group inverse, exactly", _inverse_law),
        Suite("lem:z_in_center", "exact", 0.0, "commutators are vertical, vertical elements are central, (0,1) is a commutator", _center),
        Suite("eq:koranyi_gauge", "closed-form", 1e-12, "gauge distance is left invariant, symmetric and homogeneous", _koranyi_gauge),
        Suite("def:metric/triangle", "closed-form", 1e-12, "triangle inequality of the gauge distance", _triangle),
        Suite("cor:pi_submetry", "closed-form", 1e-12, "base projection is 1-Lipschitz and isometric on horizontal lines", _pi_submetry),
        Suite("pro:vert_flip", "exact", 0.0, "the vertical flip is an involutive isometry fixing the real line", _vert_flip),
        Suite("pro:euclid_square_fiber", "closed-form", 1e-12, "squared distances add along a fiber", _fiber_pythagoras),
        Suite("eq:fiber_distance", "closed-form", 1e-12, "fiber distance equals 2 sqrt|dh|", _fiber_distance),
        Suite("eq:distance_formula", "closed-form", 1e-12, "distance formula with the c^2/8 term at c = 2 matches the gauge", _distance_formula),
        Suite("lem:multi_law", "closed-form", 1e-12, "product height equals the holonomy of the lifted triangle", _multi_law),
        Suite("pro:comp_dist_function", "closed-form", 1e-9, "distance^4 = base^4 + fiber^4", _d_law),
        Suite("lem:homogeneous_dist_function", "closed-form", 1e-10, "distance components scale linearly under dilation", _d_homogeneous),
        # Busemann functions and slopes
        Suite("eq:dist_busemann/closed-form", "limit", 1e-6, "extrapolated Busemann function against its closed form", _busemann_closed_form, BOTH),
        Suite("eq:busemann_flat", "limit", 1e-5, "opposite Busemann functions sum to zero", _busemann_flat, BOTH),
        Suite("eq:duality", "limit", 1e-4, "Busemann function as log-derivative of the inverted distance", _duality, BOTH),
        Suite("pro:busemann_affine", "limit", 1e-5, "Busemann functions are affine along lines", _busemann_affine, BOTH),
        Suite("lem:slope_symmetry", "limit", 2e-3, "slope(l', l) = slope(l, l')", _slope_symmetry, BOTH),
        Suite("def:slope/self", "limit", 1e-6, "a line has slope -1 with respect to itself", _slope_self, BOTH),
        Suite("def:slope/closed-form", "limit", 1e-4, "slope equals minus the cosine of the base angle", _slope_closed_form, BOTH),
        Suite("def:slope/orientation", "limit", 2e-3, "slope flips sign with orientation and stays in [-1, 1]", _slope_orientation, BOTH),
        # zigzag curves
        Suite("lem:busemann_affine_zigzag", "limit", 1e-3, "Busemann function is nearly affine along the zigzag, error halving per depth", _zigzag_affinity, BOTH),
        Suite("lem:uspeed_parameter_zigzag", "limit", 1e-3, "zigzag along an orthogonal frame has speed sqrt(sum s^2)/sum s", _zigzag_speed, BOTH),
        Suite("pro:zigzag_geodesic/cauchy", "limit", 0.75, "gap between consecutive depths decays geometrically", _zigzag_cauchy, BOTH),
        Suite("lem:max_orthogonal", "limit", 1e-3, "squared slopes against a maximal orthogonal frame sum to 1", _max_frame, BOTH),
        Suite("lem:orthogonalization_procedure", "limit", 1e-3, "orthogonalized zigzag has zero slope against the frame", _orthogonalization, BOTH),
        # lifting polygons, area law, complex structure
        Suite("pro:lift_const_2", "closed-form", 1e-6, "lifting constant on a complex line is 2", _lift_const),
        Suite("negative:real-plane-c-zero", "negative", 1e-6, "totally real planes have vanishing holonomy (k >= 3)", _real_plane),
        Suite("eq:area_law", "closed-form", 1e-6, "squared displacement is linear in area with c = 2 sqrt|<Ju, v>|", _area_law),
        Suite("lem:adding_lifts", "closed-form", 1e-10, "lift of a split polygon composes the lifts of its parts", _adding_lifts),
        Suite("lem:unit_square", "closed-form", 1e-12, "the unit square u ^ Ju has displacement 2", _unit_square),
        Suite("pro:linear_functional", "closed-form", 1e-9, "xi_u is linear on the orthogonal complement, xi_1(i) = 4", _linear_functional),
        Suite("pro:complex_structure/J-equals-i", "limit", 1e-4, "maximizer of xi_u is multiplication by i", _J_equals_i),
        Suite("pro:complex_structure/J-squared", "limit", 1e-4, "recovered J squares to minus the identity", _J_squared),
        Suite("pro:complex_structure/equivariance", "limit", 1e-4, "recovered J commutes with unitaries and ignores dilation", _J_equivariance),
        Suite("lem:xi_norm", "limit", 1e-4, "norm of xi_u is c^2 = 4", _xi_norm),
        # R-circles
        Suite("def:ptolemy_circle/r-circles", "closed-form", 1e-9, "constructed R-circles satisfy the Ptolemy equality", _r_circle_ptolemy),
        Suite("lem:mean_geometric", "closed-form", 1e-8, "|xz| |zy| = |zu|^2 for u above z", _diag_field("mean_geometric")),
        Suite("pro:unit_rcircle", "closed-form", 1e-9, "every point of the circle is at the same distance from its center", _diag_field("unit_radius")),
        Suite("lem:equal_distances", "closed-form", 1e-8, "points of the two arcs above z are equidistant from z", _diag_field("symmetric")),
        Suite("cor:circle_cover_twice", "closed-form", 0.0, "each arc projects monotonically onto the fiber segment", _diag_field("two_sheet")),
        Suite("cor:3c_4c", "closed-form", 1e-9, "C-circle through two points passes through both", _c_circles),
        Suite("negative:c-circle-not-ptolemy", "negative", 0.0, "C-circles fail the Ptolemy equality", _c_circle_negative),
        Suite("lem:quaratic_excess", "limit", 1e-6, "Busemann sums stay below the quadratic excess bound on both arcs", _quadratic_excess),
        Suite("eq:first_variation", "limit", 1e-3, "tangent slope equals the first variation of the distance", _first_variation),
        Suite("lem:complex_line", "limit", 1e-3, "radius and tangent at a fiber-free point span a complex line", _complex_line),
        Suite("lem:mu_distortion", "closed-form", 1e-9, "fiber projection distorts distance by at most the triangle holonomy", _mu_distortion),
        Suite("lem:circle_rectifiable", "limit", 0.5, "(arc length - chord) / chord^2 shrinks with the chord", _rectifiable),
        Suite("pro:tangent_rcircle", "limit", 0.5, "distance-to-chord ratio shrinks as the point nears the tangency", _tangent),
    ]
}

# every anchor the registry must cover
ANCHORS: tuple[str, ...] = (
    "eq:PT_eq",
    "pro:moeb_ptolemy",
    "lem:sinversion_minversion",
    "lem:sphere_sinversion",
    "lem:mult_hermitian",
    "lem:z_in_center",
    "eq:koranyi_gauge",
    "pro:vert_flip",
    "pro:euclid_square_fiber",
    "eq:distance_formula",
    "lem:multi_law",
    "pro:comp_dist_function",
    "lem:homogeneous_dist_function",
    "eq:dist_busemann",
    "eq:busemann_flat",
    "eq:duality",
    "pro:busemann_affine",
    "lem:slope_symmetry",
    "lem:busemann_affine_zigzag",
    "lem:uspeed_parameter_zigzag",
    "lem:max_orthogonal",
    "lem:orthogonalization_procedure",
    "pro:lift_const_2",
    "eq:area_law",
    "lem:adding_lifts",
    "pro:linear_functional",
    "pro:complex_structure",
    "lem:xi_norm",
    "lem:mean_geometric",
    "pro:unit_rcircle",
    "lem:equal_distances",
    "cor:circle_cover_twice",
    "cor:3c_4c",
    "lem:quaratic_excess",
    "eq:first_variation",
    "lem:complex_line",
    "lem:mu_distortion",
    "lem:circle_rectifiable",
    "pro:tangent_rcircle",
    "cor:pi_submetry",
)


def list_suites(model: str | None = None) -> list[tuple[str, str, str]]:
    return [(s.tag, s.anchor, s.description) for s in SUITES.values() if model is None or model in s.models]


def suite_seed(seed: int, tag: str, k: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(tag.encode()), k])


def build_model(cfg: SuiteConfig):
    if cfg.model == "heis":
        return heis_model(cfg.k)
    if cfg.model == "euclid":
        return euclidean_model(cfg.n)
    raise ValueError(f"unknown model {cfg.model!r}")


def resolve_tag(tag: str) -> str:
    """Canonical registry tag; "prop:" is accepted as an alias of "pro:"."""
    if tag not in SUITES and tag.startswith("prop:"):
        return "pro:" + tag[len("prop:"):]
    return tag


def run_suite(tag: str, config: SuiteConfig | None = None) -> SuiteReport:
    config = config or SuiteConfig()
    tag = resolve_tag(tag)
    suite = SUITES.get(tag)
    if suite is None:
        raise UnknownSuite(f"no suite tagged {tag!r}")
    if config.model not in suite.models:
        raise UnknownSuite(f"suite {tag!r} does not run on model {config.model!r}")
    tol = config.tolerance(tag, suite.tol)
    ctx = Context(config, suite_seed(config.seed, tag, config.k), build_model(config))
    t0 = time.perf_counter()
    try:
        out = suite.fn(ctx)
    except MoebiusError as exc:
        out = Outcome(math.inf, 0, {"error": f"{type(exc).__name__}: {exc}"})
    ms = int(round(1000 * (time.perf_counter() - t0)))
    residual = float(out.residual)
    passed = bool(residual <= tol)
    witness = _jsonable(out.witness) if (not passed or "error" in (out.witness or {})) else None
    k = config.k if config.model == "heis" else config.n
    return SuiteReport(tag, passed, residual, tol, int(out.n), ms, config.model, k, witness, _jsonable(out.notes))


@dataclass(frozen=True)
class RunSummary:
    reports: list[SuiteReport]

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.reports)

    @property
    def failed(self) -> int:
        return len(self.reports) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self, include_runtime: bool = False) -> dict:
        return {
            "summary": {"total": len(self.reports), "passed": self.passed, "failed": self.failed},
            "reports": [r.to_json(include_runtime) for r in self.reports],
        }


def run_all(config: SuiteConfig | None = None, only: list[str] | None = None, workers: int = 4) -> RunSummary:
    """Run every suite for the configured model (or the tagged subset) in parallel."""
    config = config or SuiteConfig()
    tags = [resolve_tag(t) for t in only] if only is not None else [s.tag for s in SUITES.values() if config.model in s.models]
    for t in tags:
        if t not in SUITES:
            raise UnknownSuite(f"no suite tagged {t!r}")
    if workers <= 1:
        reports = [run_suite(t, config) for t in tags]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda t: run_suite(t, config), tags))
    return RunSummary(reports)
