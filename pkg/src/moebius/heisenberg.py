"""Heisenberg group C^m x R with the Koranyi gauge metric (m = k - 1).

Points are stored packed as real arrays ``(re z1, im z1, ..., re zm, im zm, h)``
so they fit the generic ExtendedPoint / MetricEvaluator machinery.  The
Hermitian form is (z, w) = sum z_i conj(w_i) and the product is

    (z, h) . (w, g) = (z + w, h + g - Im(z, w) / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import INF, ExtendedPoint, MetricEvaluator, MoebiusMap, as_point, compose
from .errors import (
    CoincidentPoints,
    CoincidentPoles,
    DegenerateTriple,
    DimensionMismatch,
    InfinityNotProjectable,
    NonUnitDirection,
    PoleOnLine,
    RadiusNonPositive,
    UndefinedAtOrigin,
)
from .io import csv_text

# ---------------------------------------------------------------------------
# packed coordinates


def split(X) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, float)
    return X[..., :-1:2] + 1j * X[..., 1:-1:2], X[..., -1]


def pack(Z, h) -> np.ndarray:
    Z = np.asarray(Z, complex)
    h = np.asarray(h, float)
    shape = np.broadcast_shapes(Z.shape[:-1], h.shape)
    out = np.empty(shape + (2 * Z.shape[-1] + 1,))
    out[..., :-1:2] = Z.real
    out[..., 1:-1:2] = Z.imag
    out[..., -1] = h
    return out


def real_to_complex(W) -> np.ndarray:
    """Base vector (re1, im1, ...) -> complex vector."""
    W = np.asarray(W, float)
    return W[..., 0::2] + 1j * W[..., 1::2]


def complex_to_real(Z) -> np.ndarray:
    Z = np.asarray(Z, complex)
    out = np.empty(Z.shape[:-1] + (2 * Z.shape[-1],))
    out[..., 0::2] = Z.real
    out[..., 1::2] = Z.imag
    return out


def herm(Z, W) -> np.ndarray:
    return np.sum(Z * np.conj(W), axis=-1)


def im_herm(Z, W) -> np.ndarray:
    """Im(z, w) in plain real arithmetic, so Im(z, -z) and Im(w, z) + Im(z, w) vanish exactly."""
    return np.sum(Z.imag * W.real - Z.real * W.imag, axis=-1)


def mul(X, Y) -> np.ndarray:
    zx, hx = split(X)
    zy, hy = split(Y)
    return pack(zx + zy, hx + hy - 0.5 * im_herm(zx, zy))


def inverse(X) -> np.ndarray:
    return -np.asarray(X, float)


def gauge(X) -> np.ndarray:
    z, h = split(X)
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    return (r2 * r2 + 16 * h * h) ** 0.25


def koranyi_pair(X, Y) -> np.ndarray:
    """|xy|^4 = |z - z'|^4 + 16 (h - h' - Im(z, z') / 2)^2."""
    zx, hx = split(X)
    zy, hy = split(Y)
    dz2 = np.sum(np.abs(zx - zy) ** 2, axis=-1)
    w = hx - hy - 0.5 * im_herm(zx, zy)
    return (dz2 * dz2 + 16 * w * w) ** 0.25


# ---------------------------------------------------------------------------
# group elements


@dataclass(frozen=True)
class HeisElement:
    z: tuple[complex, ...]
    h: float

    def __post_init__(self):
        z = tuple(complex(v) for v in np.ravel(np.asarray(self.z, complex)))
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in z) or not math.isfinite(self.h):
            raise ValueError("non-finite Heisenberg coordinates")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "h", float(self.h))

    @property
    def m(self) -> int:
        return len(self.z)

    @property
    def packed(self) -> np.ndarray:
        return pack(np.array(self.z), self.h)

    @classmethod
    def from_packed(cls, X) -> "HeisElement":
        z, h = split(X)
        return cls(tuple(z), float(h))

    @classmethod
    def identity(cls, m: int) -> "HeisElement":
        return cls((0j,) * m, 0.0)

    def point(self) -> ExtendedPoint:
        return ExtendedPoint.finite(self.packed)

    def to_json(self) -> dict:
        return {"z": [[v.real, v.imag] for v in self.z], "h": self.h}

    @classmethod
    def from_json(cls, obj) -> "HeisElement":
        return cls(tuple(complex(a, b) for a, b in obj["z"]), obj["h"])

    def __mul__(self, other: "HeisElement") -> "HeisElement":
        return heis_mul(self, other)


def heis_mul(g: HeisElement, g2: HeisElement) -> HeisElement:
    if g.m != g2.m:
        raise DimensionMismatch(f"dimensions {g.m} and {g2.m} differ")
    return HeisElement.from_packed(mul(g.packed, g2.packed))


def heis_inverse(g: HeisElement) -> HeisElement:
    return HeisElement(tuple(-v for v in g.z), -g.h)


def koranyi_gauge(g: HeisElement) -> float:
    return float(gauge(g.packed))


def commutator(g: HeisElement, g2: HeisElement) -> HeisElement:
    """g g2 g^-1 g2^-1."""
    return heis_mul(heis_mul(g, g2), heis_mul(heis_inverse(g), heis_inverse(g2)))


def _as_packed(p) -> np.ndarray:
    if isinstance(p, HeisElement):
        return p.packed
    return as_point(p).array


def koranyi_dist(x, y) -> float:
    """Koranyi distance between extended points (infinity allowed)."""
    x = x.point() if isinstance(x, HeisElement) else as_point(x)
    y = y.point() if isinstance(y, HeisElement) else as_point(y)
    if x == y:
        return 0.0
    if x.is_inf or y.is_inf:
        return math.inf
    return float(koranyi_pair(x.array, y.array))


# ---------------------------------------------------------------------------
# maps


def _map(core: Callable[[np.ndarray], np.ndarray], at_inf: np.ndarray | None, label: str, inverse=None) -> MoebiusMap:
    """Wrap a packed-array map; infinite rows stand for the point at infinity.

    ``at_inf`` is the image of infinity (None: infinity is fixed).  ``core``
    returns inf rows for points sent to infinity.
    """

    def batch(X):
        X = np.asarray(X, float)
        finite = np.all(np.isfinite(X), axis=-1, keepdims=True)
        safe = np.where(finite, X, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = core(safe)
        out = np.where(np.all(np.isfinite(out), axis=-1, keepdims=True), out, np.inf)
        img_inf = np.inf if at_inf is None else at_inf
        return np.where(finite, out, img_inf)

    def fwd(p: ExtendedPoint) -> ExtendedPoint:
        if p.is_inf:
            return INF if at_inf is None else ExtendedPoint.finite(at_inf)
        row = batch(p.array)
        return ExtendedPoint.finite(row) if np.all(np.isfinite(row)) else INF

    if inverse == "self":
        return MoebiusMap(fwd, fwd, label, batch)
    return MoebiusMap(fwd, None if inverse is None else inverse.forward, label, batch)


def translation(g) -> MoebiusMap:
    """Left translation x -> g x (an isometry)."""
    G = _as_packed(g)
    back = _map(lambda X: mul(-G, X), None, "T^-1")
    return _map(lambda X: mul(G, X), None, f"T{tuple(np.round(G, 6))}", inverse=back)


def dilation(lam: float) -> MoebiusMap:
    if not lam > 0:
        raise RadiusNonPositive(f"dilation factor must be positive, got {lam}")

    def scale(s):
        def core(X):
            z, h = split(X)
            return pack(s * z, s * s * h)

        return core

    back = _map(scale(1 / lam), None, "delta^-1")
    return _map(scale(lam), None, f"delta{lam}", inverse=back)


def unitary(U) -> MoebiusMap:
    """(z, h) -> (U z, h) for a unitary matrix U."""
    U = np.asarray(U, complex)
    Uh = U.conj().T
    back = _map(lambda X: pack(split(X)[0] @ Uh.T, split(X)[1]), None, "U^-1")
    return _map(lambda X: pack(split(X)[0] @ U.T, split(X)[1]), None, "U", inverse=back)


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    A = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def conj_flip() -> MoebiusMap:
    """Vertical flip (z, h) -> (conj z, -h)."""

    def core(X):
        z, h = split(X)
        return pack(np.conj(z), -h)

    return _map(core, None, "j", inverse="self")


def _iota_core(X):
    z, h = split(X)
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    n4 = r2 * r2 + 16 * h * h
    zi = -z / (r2 + 4j * h)[..., None]
    out = pack(zi, -h / n4)
    return np.where((n4 == 0)[..., None], np.inf, out)


def koranyi_inversion(m: int) -> MoebiusMap:
    """Involution swapping the origin and infinity with |ix iy| = |xy| / (N(x) N(y)).

    Coordinate form (-z / (|z|^2 + 4ih), -h / N^4); the sign of the 4ih term
    is the one that satisfies the metric identity.
    """
    return _map(_iota_core, np.zeros(2 * m + 1), "iota", inverse="self")


def iota_element(g: HeisElement) -> HeisElement:
    """Koranyi inversion of a finite element; the identity has no finite image."""
    if not any(g.z) and g.h == 0:
        raise UndefinedAtOrigin(g.point(), "the origin is sent to infinity")
    return HeisElement.from_packed(_iota_core(g.packed))


def inversion_at(p, r: float = 1.0) -> MoebiusMap:
    """Inversion in the Koranyi sphere of radius r about p.

    Pulls the Koranyi metric back to r^2 |xy| / (|xp| |yp|).
    """
    P = _as_packed(p)
    if not r > 0:
        raise RadiusNonPositive(f"radius must be positive, got {r}")

    def core(X):
        Q = mul(-P, X)
        z, h = split(Q)
        Q = pack(z / r, h / (r * r))
        Q = _iota_core(Q)
        z, h = split(Q)
        return mul(P, pack(r * z, r * r * h))

    return _map(core, P, f"inv(p, r={r})", inverse="self")


def space_inversion(omega, omega_prime, r: float) -> MoebiusMap:
    """Involution swapping omega and omega' and preserving the sphere of radius r
    about omega, measured in the metric for which omega' is infinitely remote
    (the Koranyi metric when omega' = INF, else its unit-radius inversion at omega').
    """
    w, wp = as_point(omega), as_point(omega_prime)
    if w == wp:
        raise CoincidentPoles("poles must differ")
    if not r > 0:
        raise RadiusNonPositive(f"radius must be positive, got {r}")
    if wp.is_inf:
        return inversion_at(w.array, r)
    if w.is_inf:
        return inversion_at(wp.array, 1.0 / r)
    psi = inversion_at(wp.array, 1.0)
    p = psi(w)
    inner = inversion_at(p.array, r)
    return compose(psi, inner, psi)


# ---------------------------------------------------------------------------
# fibration


def fibration_project(x) -> np.ndarray:
    if isinstance(x, ExtendedPoint) and x.is_inf:
        raise InfinityNotProjectable("infinity has no base point")
    X = x if isinstance(x, np.ndarray) else _as_packed(x)
    return split(X)[0]


def mu_project(x, z0) -> np.ndarray:
    """Point of the fiber over z0 joined to x by a horizontal line: (z0, h - Im(z, z0)/2)."""
    X = _as_packed(x) if not isinstance(x, np.ndarray) else x
    z, h = split(X)
    z0 = np.asarray(z0, complex)
    return pack(np.broadcast_to(z0, z.shape), h - 0.5 * im_herm(z, z0))


# ---------------------------------------------------------------------------
# lines


@dataclass(frozen=True)
class HorizontalLine:
    """Unit-speed Ptolemy line t -> g (t zeta, 0)."""

    g: np.ndarray
    zeta: np.ndarray

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, float)
        return mul(self.g, pack(t[..., None] * self.zeta, np.zeros(t.shape)))

    def reversed(self) -> "HorizontalLine":
        return HorizontalLine(self.g, -self.zeta)

    def through(self, p) -> "HorizontalLine":
        return HorizontalLine(np.asarray(p, float), self.zeta)

    @property
    def base_direction(self) -> np.ndarray:
        return complex_to_real(self.zeta)

    def foot(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Parameter of the base projection onto the line and distance to that point."""
        Q = mul(-self.g, X)
        w, _ = split(Q)
        t = herm(w, self.zeta).real
        return t, koranyi_pair(self(t), X)

    def offset(self, X) -> np.ndarray:
        """Vector that vanishes exactly on the line: off-line base part and height of g^-1 x."""
        w, h = split(mul(-self.g, X))
        w_perp = w - herm(w, self.zeta).real[..., None] * self.zeta
        return np.concatenate([complex_to_real(w_perp), h[..., None]], axis=-1)

    def contains(self, p, tol: float = 1e-12) -> bool:
        P = _as_packed(p)
        t, res = self.foot(P)
        return bool(res <= tol * max(1.0, float(gauge(P))))


def horizontal_line(g, zeta, tol: float = 1e-12) -> HorizontalLine:
    zeta = np.atleast_1d(np.asarray(zeta, complex))
    norm = float(np.sqrt(np.sum(np.abs(zeta) ** 2)))
    if abs(norm - 1) > tol:
        raise NonUnitDirection(f"|zeta| = {norm}")
    G = _as_packed(g)
    if G.shape[-1] != 2 * zeta.shape[-1] + 1:
        raise DimensionMismatch("direction and base point dimensions differ")
    return HorizontalLine(G, zeta / norm)


@dataclass(frozen=True)
class CLine:
    """Fiber over z0: h -> (z0, h)."""

    z0: np.ndarray

    def __call__(self, h) -> np.ndarray:
        h = np.asarray(h, float)
        return pack(np.broadcast_to(self.z0, h.shape + self.z0.shape), h)


@dataclass(frozen=True)
class ClosedCurve:
    """Image of (curve u {infinity}) under a Moebius map, parameterized by an angle.

    theta in (-pi, pi] maps to the curve parameter scale * tan(theta / 2);
    theta = pi is the image of infinity.
    """

    curve: Callable[[np.ndarray], np.ndarray]
    moebius: MoebiusMap | None
    scale: float = 1.0
    kind: str = "R"

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, float)
        wrapped = np.remainder(theta + math.pi, 2 * math.pi) - math.pi
        at_inf = np.abs(wrapped + math.pi) < 1e-300
        with np.errstate(over="ignore", invalid="ignore"):
            t = self.scale * np.tan(wrapped / 2)
        t = np.where(at_inf, 0.0, t)
        P = self.curve(t)
        if self.moebius is not None:
            P = self.moebius.apply(P)
        if np.any(at_inf):
            img = self.image_of_infinity()
            P = np.where(at_inf[..., None], img, P)
        return P

    def image_of_infinity(self) -> np.ndarray:
        if self.moebius is None:
            return np.inf
        p = self.moebius(INF)
        return np.inf if p.is_inf else p.array

    def angles(self, n: int) -> np.ndarray:
        return -math.pi + 2 * math.pi * np.arange(n) / n

    def sample(self, n: int) -> np.ndarray:
        return self(self.angles(n))

    def to_csv(self, n: int, summary: dict | None = None) -> str:
        th = self.angles(n)
        P = self(th)
        keep = np.all(np.isfinite(P), axis=-1)
        m = (P.shape[-1] - 1) // 2
        header = ["t"] + [f"{p}(z{i + 1})" for i in range(m) for p in ("re", "im")] + ["h"]
        return csv_text(header, (np.concatenate([[a], p]) for a, p in zip(th[keep], P[keep])), summary)


def r_circle_from_line(line: HorizontalLine, inv: MoebiusMap) -> ClosedCurve:
    """Bounded Ptolemy circle: image of line u {infinity} under an inversion."""
    back = inv.inverse or inv.forward
    pole = back(INF)
    if pole.is_inf:
        raise PoleOnLine("map fixes infinity; the image is unbounded")
    if line.contains(pole.array, tol=1e-12):
        raise PoleOnLine("inversion pole lies on the line")
    _, rho = line.foot(pole.array)
    return ClosedCurve(line, inv, float(rho), "R")


def r_circle_through(a, b, c, tol: float = 1e-10) -> ClosedCurve:
    """The R-circle through three finite points, if they lie on one."""
    A, B, C = (_as_packed(p) for p in (a, b, c))
    if np.array_equal(A, B) or np.array_equal(A, C) or np.array_equal(B, C):
        raise DegenerateTriple("points must be pairwise distinct")
    psi = inversion_at(A, 1.0)
    B1, C1 = psi.apply(B), psi.apply(C)
    w, s = split(mul(-B1, C1))
    w2 = float(np.sum(np.abs(w) ** 2))
    if w2 == 0 or abs(float(s)) > tol * max(w2, 1e-300):
        raise DegenerateTriple("points do not lie on a common R-circle")
    line = HorizontalLine(B1, w / math.sqrt(w2))
    return r_circle_from_line(line, psi)


def unit_r_circle(m: int = 1) -> ClosedCurve:
    """R-circle through (0, -1/4), (0, 1/4), (1, 0): center 0, radius 1."""
    e = np.zeros(m, complex)
    e1 = e.copy()
    e1[0] = 1
    return r_circle_through(pack(e, -0.25), pack(e, 0.25), pack(e1, 0.0))


def c_circle_through(p, q) -> ClosedCurve:
    """The unique C-circle through p and q."""
    P, Q = as_point(p), as_point(q)
    if P == Q:
        raise CoincidentPoints("points must differ")
    if P.is_inf or Q.is_inf:
        z0 = split((Q if P.is_inf else P).array)[0]
        return ClosedCurve(CLine(z0), None, 1.0, "C")
    zp, hp = split(P.array)
    zq, hq = split(Q.array)
    if np.array_equal(zp, zq):
        return ClosedCurve(CLine(zp), None, 1.0, "C")
    psi = inversion_at(Q.array, 1.0)
    P1 = psi.apply(P.array)
    z1, h1 = split(P1)
    fiber = CLine(z1)
    # put P at a finite parameter: shift the fiber so that h1 is parameter 0
    shifted = lambda h: fiber(np.asarray(h) + h1)  # noqa: E731
    return ClosedCurve(shifted, psi, float(np.sum(np.abs(z1) ** 2)), "C")


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class HeisModel:
    k: int
    metric: MetricEvaluator = field(repr=False)

    @property
    def m(self) -> int:
        return self.k - 1

    @property
    def dim(self) -> int:
        return 2 * self.m + 1

    @property
    def base_dim(self) -> int:
        return 2 * self.m

    @property
    def origin(self) -> np.ndarray:
        return np.zeros(self.dim)

    def dist(self, X, Y) -> np.ndarray:
        return koranyi_pair(X, Y)

    def line(self, point, direction) -> HorizontalLine:
        d = np.asarray(direction)
        zeta = d if np.iscomplexobj(d) else real_to_complex(d)
        return horizontal_line(np.asarray(point, float), zeta, tol=1e-9)

    def base(self, X) -> np.ndarray:
        return np.asarray(X, float)[..., :-1]

    def fiber_coordinate(self, X) -> np.ndarray:
        return np.asarray(X, float)[..., -1]

    def step(self, X, W) -> np.ndarray:
        W = np.asarray(W, float)
        return mul(X, pack(real_to_complex(W), np.zeros(W.shape[:-1])))

    def walk(self, o, steps) -> np.ndarray:
        """o (w1,0)(w2,0)...(wj,0) for every j, via cumulative sums."""
        w = real_to_complex(np.asarray(steps, float))
        W = np.cumsum(w, axis=0)
        prev = np.vstack([np.zeros((1, w.shape[-1]), complex), W[:-1]])
        H = np.cumsum(-0.5 * im_herm(prev, w))
        return mul(np.asarray(o, float), pack(W, H))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(size=(size, self.dim))

    def fiber_point(self, w, h) -> np.ndarray:
        """Point over base vector w (real packed) at height h."""
        w = np.asarray(w, float)
        h = np.asarray(h, float)
        return pack(np.broadcast_to(real_to_complex(w), h.shape + (self.m,)), h)


def koranyi_metric(k: int) -> MetricEvaluator:
    return MetricEvaluator(koranyi_pair, INF, f"koranyi{k}")


K_MAX = 4


def heis_model(k: int = 2, k_max: int = K_MAX) -> HeisModel:
    """Model of complex dimension k - 1; k is capped to keep sampling suites fast."""
    if not 2 <= k <= k_max:
        raise ValueError(f"k must be between 2 and {k_max}, got {k}")
    return HeisModel(k, koranyi_metric(k))
