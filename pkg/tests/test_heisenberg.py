import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moebius.core import INF, ExtendedPoint, circle_residual, m_invert, moebius_residual, pullback
from moebius.errors import (
    CoincidentPoints,
    CoincidentPoles,
    DegenerateTriple,
    DimensionMismatch,
    InfinityNotProjectable,
    NonUnitDirection,
    PoleOnLine,
    UndefinedAtOrigin,
)
from moebius.heisenberg import (
    HeisElement,
    c_circle_through,
    commutator,
    conj_flip,
    dilation,
    fibration_project,
    gauge,
    heis_inverse,
    heis_model,
    heis_mul,
    horizontal_line,
    iota_element,
    koranyi_dist,
    koranyi_gauge,
    koranyi_inversion,
    koranyi_metric,
    koranyi_pair,
    mu_project,
    mul,
    pack,
    r_circle_from_line,
    r_circle_through,
    space_inversion,
    split,
    translation,
    unit_r_circle,
    unitary,
    random_unitary,
)

from .strategies import batches, coord, positive, seeds


def H(z, h):
    return HeisElement(tuple(np.atleast_1d(z)), h)


def ref_mul(g, g2):
    """Product written out from the group law with (z, w) = sum z_i conj(w_i)."""
    form = sum(a * b.conjugate() for a, b in zip(g.z, g2.z))
    return tuple(a + b for a, b in zip(g.z, g2.z)), g.h + g2.h - 0.5 * form.imag


def ref_dist(x, y):
    """Koranyi distance from its defining quartic, via the inverse and the product."""
    z = [b - a for a, b in zip(x.z, y.z)]
    form = sum((-a) * b.conjugate() for a, b in zip(x.z, y.z))
    h = y.h - x.h - 0.5 * form.imag
    r2 = sum(abs(v) ** 2 for v in z)
    return (r2 * r2 + 16 * h * h) ** 0.25


elements = st.builds(
    lambda re, im, h: HeisElement(tuple(complex(a, b) for a, b in zip(re, im)), h),
    st.lists(coord, min_size=2, max_size=2),
    st.lists(coord, min_size=2, max_size=2),
    coord,
)


# ---------------------------------------------------------------------------
# group law


def test_identity_and_product_example():
    g = H(0.3 - 1.2j, 0.7)
    assert heis_mul(g, HeisElement.identity(1)) == g
    z, h = ref_mul(H(1, 0), H(1j, 0))
    assert z == (1 + 1j,) and h == 0.5
    assert heis_mul(H(1, 0), H(1j, 0)) == H(1 + 1j, 0.5)


def test_commutator_of_real_and_imaginary_units():
    c = commutator(H(1, 0), H(1j, 0))
    assert c == H(0, 1.0)


def test_inverse_examples():
    assert heis_inverse(H(0, 2.5)) == H(0, -2.5)
    g = H(1.5 - 2j, 0.25)
    assert heis_mul(g, heis_inverse(g)) == HeisElement.identity(1)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        heis_mul(H(1, 0), HeisElement((1, 2j), 0.0))


@given(elements, elements)
def test_product_matches_reference(g, g2):
    z, h = ref_mul(g, g2)
    out = heis_mul(g, g2)
    assert np.allclose(out.z, z, atol=1e-12) and out.h == pytest.approx(h, abs=1e-12)


@given(elements, elements, elements)
def test_associativity(a, b, c):
    l, r = heis_mul(heis_mul(a, b), c), heis_mul(a, heis_mul(b, c))
    assert np.allclose(l.z, r.z, atol=1e-12) and abs(l.h - r.h) <= 1e-12


@given(elements)
def test_inverse_law_exact(g):
    assert heis_mul(heis_inverse(g), g) == HeisElement.identity(2)


@given(elements, elements, coord)
def test_commutators_are_central(g, g2, h):
    c = commutator(g, g2)
    assert all(v == 0 for v in c.z)
    center = H(np.zeros(2), h)
    assert heis_mul(center, g) == heis_mul(g, center)


@given(st.floats(-20, 20, allow_nan=False))
def test_every_central_element_is_a_commutator(h):
    # [(a, 0), (i a, 0)] = (0, |a|^2), and swapping the arguments flips the sign
    a = math.sqrt(abs(h))
    g, g2 = H([a, 0], 0), H([1j * a, 0], 0)
    c = commutator(g, g2) if h >= 0 else commutator(g2, g)
    assert all(v == 0 for v in c.z) and c.h == pytest.approx(h, rel=1e-15, abs=1e-300)


def test_element_json_round_trip():
    g = H([1 - 2j, 0.5j], -3.25)
    assert HeisElement.from_json(g.to_json()) == g
    assert HeisElement.from_packed(g.packed) == g


# ---------------------------------------------------------------------------
# gauge and distance


def test_gauge_examples():
    assert koranyi_gauge(H(0, 1)) == pytest.approx(16**0.25)
    assert koranyi_gauge(H(3 + 4j, 0)) == pytest.approx(5.0)


def test_distance_examples():
    assert koranyi_dist(H(0, 0), H(0, 1)) == pytest.approx(2.0)
    assert koranyi_dist(H(0, 0), H(0.6 - 0.8j, 0)) == pytest.approx(1.0)
    assert koranyi_dist(H(1, 2), INF) == math.inf


@given(elements, elements)
def test_distance_matches_reference_and_is_symmetric(x, y):
    d = koranyi_dist(x, y)
    assert d == pytest.approx(ref_dist(x, y), rel=1e-12, abs=1e-12)
    assert d == koranyi_dist(y, x)
    assert d == pytest.approx(koranyi_gauge(heis_mul(heis_inverse(x), y)), rel=1e-12, abs=1e-12)


@given(elements, positive)
def test_gauge_homogeneity(g, lam):
    img = HeisElement.from_packed(dilation(lam).apply(g.packed))
    assert koranyi_gauge(img) == pytest.approx(lam * koranyi_gauge(g), rel=1e-12, abs=1e-300)


def test_triangle_inequality(rng):
    X, Y, Z = rng.normal(size=(3, 100_000, 5)) * rng.uniform(0.01, 10, size=(3, 100_000, 1))
    dxy, dyz, dxz = koranyi_pair(X, Y), koranyi_pair(Y, Z), koranyi_pair(X, Z)
    slack = (dxy + dyz - dxz) / np.maximum(dxz, 1e-300)
    assert slack.min() >= -1e-12


def test_left_invariance(rng):
    G, X, Y = rng.normal(size=(3, 1000, 3))
    assert np.allclose(koranyi_pair(mul(G, X), mul(G, Y)), koranyi_pair(X, Y), rtol=1e-12)


@given(coord, st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False))
def test_fiber_distance_closed_form(z, h1, h2):
    x, y = pack([z + 0j], h1), pack([z + 0j], h2)
    assert koranyi_pair(x, y) == pytest.approx(2 * math.sqrt(abs(h1 - h2)), rel=1e-12, abs=1e-300)


# ---------------------------------------------------------------------------
# maps


def test_dilation_examples(rng):
    X, Y = rng.normal(size=(2, 200, 3))
    assert np.array_equal(dilation(1.0).apply(X), X)
    d2 = dilation(2.0)
    assert np.allclose(koranyi_pair(d2.apply(X), d2.apply(Y)), 2 * koranyi_pair(X, Y), rtol=1e-12)
    assert moebius_residual(koranyi_metric(2), d2, rng.normal(size=(1000, 4, 3))) <= 1e-9


def test_flip_examples(rng):
    j = conj_flip()
    X, Y = rng.normal(size=(2, 1000, 3))
    assert np.array_equal(j.apply(j.apply(X)), X)
    assert np.max(np.abs(koranyi_pair(j.apply(X), j.apply(Y)) - koranyi_pair(X, Y))) <= 1e-12
    assert np.array_equal(j.apply(pack([0j], 1.0)), pack([0j], -1.0))
    # the real horizontal line through the origin is fixed pointwise
    line = pack(np.linspace(-3, 3, 7)[:, None] + 0j, np.zeros(7))
    assert np.array_equal(j.apply(line), line)


def test_unitary_and_translation_are_isometries(rng):
    U = random_unitary(rng, 2)
    assert np.allclose(U @ U.conj().T, np.eye(2), atol=1e-14)
    X, Y = rng.normal(size=(2, 500, 5))
    for f in (unitary(U), translation(rng.normal(size=5))):
        assert np.allclose(koranyi_pair(f.apply(X), f.apply(Y)), koranyi_pair(X, Y), rtol=1e-12)


def test_iota_on_lines_through_origin_and_central_fiber():
    zeta = np.array([0.6 + 0.8j])
    for t in (0.5, -2.0, 3.0):
        assert np.allclose(koranyi_inversion(1).apply(pack(t * zeta, 0.0)), pack(-zeta / t, 0.0), atol=1e-15)
    for h in (0.25, -1.0, 4.0):
        img = koranyi_inversion(1).apply(pack([0j], h))
        assert img[-1] == pytest.approx(-1 / (16 * h), rel=1e-15)
        # gauge identity N(iota x) = 1 / N(x) forces the height above
        assert gauge(img) == pytest.approx(1 / gauge(pack([0j], h)), rel=1e-15)


def test_iota_element_and_origin():
    with pytest.raises(UndefinedAtOrigin):
        iota_element(HeisElement.identity(1))
    iota = koranyi_inversion(1)
    assert iota(ExtendedPoint.finite([0, 0, 0])) is INF
    assert iota(INF) == ExtendedPoint.finite([0, 0, 0])
    g = H(1 - 1j, 0.5)
    assert np.allclose(iota_element(g).packed, iota.apply(g.packed))


@given(batches(2, 5), seeds)
def test_iota_metric_identity(XY, seed):
    X, Y = XY
    if gauge(X) < 1e-3 or gauge(Y) < 1e-3 or koranyi_pair(X, Y) < 1e-6:
        return
    iota = koranyi_inversion(2)
    lhs = koranyi_pair(iota.apply(X), iota.apply(Y)) * gauge(X) * gauge(Y)
    assert lhs == pytest.approx(koranyi_pair(X, Y), rel=1e-10)
    assert np.allclose(iota.apply(iota.apply(X)), X, rtol=1e-10, atol=1e-10)


def test_iota_pullback_is_m_inversion(rng):
    X, Y = rng.normal(size=(2, 10_000, 3))
    d = koranyi_metric(2)
    pb = pullback(d, koranyi_inversion(1))
    mi = m_invert(d, ExtendedPoint.finite([0, 0, 0]), 1.0)
    assert np.max(np.abs(pb.pair(X, Y) / mi.pair(X, Y) - 1)) <= 1e-10


def test_space_inversion_at_infinity_and_origin_is_iota(rng):
    X = rng.normal(size=(100, 3))
    phi = space_inversion(INF, ExtendedPoint.finite([0, 0, 0]), 1.0)
    assert np.allclose(phi.apply(X), koranyi_inversion(1).apply(X), rtol=1e-14, atol=1e-14)


def test_space_inversion_has_no_fixed_points(rng):
    phi = space_inversion(INF, ExtendedPoint.finite([0, 0, 0]), 1.0)
    X = rng.normal(size=(100_000, 3)) * rng.uniform(0.1, 3, size=(100_000, 1))
    assert koranyi_pair(X, phi.apply(X)).min() > 1e-3


def sphere(rng, r, size, m=1):
    """Points on the Koranyi sphere of radius r about the origin."""
    V = rng.normal(size=(size, 2 * m + 1))
    return V * (r / gauge(V))[:, None] ** np.concatenate([np.ones(2 * m), [2.0]])


def test_space_inversion_maps_spheres(rng):
    r = 1.5
    phi = space_inversion(ExtendedPoint.finite([0, 0, 0]), INF, r)
    S = sphere(rng, 2.0, 500)
    assert np.allclose(gauge(S), 2.0, rtol=1e-14)
    assert np.max(np.abs(gauge(phi.apply(S)) - r * r / 2.0)) <= 1e-10
    # only the sphere of radius r is invariant
    for rp in (0.5, 1.0, 1.5, 3.0):
        moved = abs(float(gauge(phi.apply(sphere(rng, rp, 1))[0])) - rp)
        assert (moved <= 1e-12) == (rp == r)


def test_space_inversion_general_poles_is_involution(rng):
    w, wp = ExtendedPoint.finite([0.3, -0.2, 0.5]), ExtendedPoint.finite([-1.0, 0.4, 0.1])
    phi = space_inversion(w, wp, 0.8)
    assert phi(w) == wp or koranyi_dist(phi(w), wp) == 0
    X = rng.normal(size=(200, 3))
    back = phi.apply(phi.apply(X))
    assert np.max(np.abs(back - X) / (1 + np.abs(X))) <= 1e-9
    with pytest.raises(CoincidentPoles):
        space_inversion(w, w, 1.0)


# ---------------------------------------------------------------------------
# fibration


def test_projection(rng):
    z = np.array([1 - 1j])
    assert np.array_equal(fibration_project(pack(z, 3.0)), fibration_project(pack(z, -7.0)))
    with pytest.raises(InfinityNotProjectable):
        fibration_project(INF)
    X, Y = rng.normal(size=(2, 1000, 3))
    base = np.linalg.norm(X[:, :2] - Y[:, :2], axis=-1)
    assert np.all(base <= koranyi_pair(X, Y) * (1 + 1e-15))


def test_projection_is_isometric_on_horizontal_lines(rng):
    line = horizontal_line(rng.normal(size=3), np.array([0.8j - 0.6]))
    s, t = rng.uniform(-5, 5, size=(2, 100))
    base = np.abs(fibration_project(line(s)) - fibration_project(line(t)))[:, 0]
    assert np.allclose(base, np.abs(s - t), rtol=1e-12)


def test_mu_project_examples():
    x = pack([1 + 0j], 0.0)
    assert np.array_equal(mu_project(x, [1 + 0j]), x)
    # (i, -Im(1 * conj(i)) / 2) = (i, 1/2)
    out = mu_project(x, [1j])
    assert np.allclose(out, pack([1j], -0.5 * (1 * np.conj(1j)).imag))
    assert np.allclose(out, pack([1j], 0.5))


@given(batches(1, 5), batches(1, 4))
def test_mu_project_lies_on_a_horizontal_line_with_x(X, W):
    x = X[0]
    z0 = W[0, 0::2] + 1j * W[0, 1::2]
    zx, _ = split(x)
    dz = z0 - zx
    n = float(np.linalg.norm(dz))
    if n < 1e-6:
        return
    line = horizontal_line(x, dz / n)
    assert np.allclose(line(n), mu_project(x, z0), atol=1e-10)


# ---------------------------------------------------------------------------
# lines and circles


def test_horizontal_line_examples(rng):
    line = horizontal_line(np.zeros(3), 1)
    assert np.array_equal(line(np.array([2.0, -1.0])), pack(np.array([[2 + 0j], [-1 + 0j]]), 0.0))
    with pytest.raises(NonUnitDirection):
        horizontal_line(np.zeros(3), 2)
    g = rng.normal(size=5)
    zeta = np.array([0.6, 0.8j])
    ln = horizontal_line(g, zeta)
    s, t = rng.uniform(-10, 10, size=(2, 1000))
    # exact unit speed: the height of line(s)^-1 line(t) vanishes identically
    assert np.max(np.abs(split(mul(-ln(s), ln(t)))[1])) <= 1e-12
    assert np.allclose(koranyi_pair(ln(s), ln(t)), np.abs(s - t), rtol=1e-10)


def test_r_circle_from_line_is_ptolemy():
    line = horizontal_line(pack([0.7j], 0.0), 1)
    circle = r_circle_from_line(line, koranyi_inversion(1))
    pts = [ExtendedPoint.finite(p) for p in circle.sample(16)]
    assert circle_residual(koranyi_metric(2), pts) <= 1e-9


def test_r_circle_pole_on_line():
    with pytest.raises(PoleOnLine):
        r_circle_from_line(horizontal_line(np.zeros(3), 1), koranyi_inversion(1))


def test_unit_r_circle_has_unit_radius():
    for m in (1, 2):
        c = unit_r_circle(m)
        P = c.sample(512)
        assert np.max(np.abs(gauge(P) - 1)) <= 1e-9
        pts = [ExtendedPoint.finite(p) for p in c.sample(12)]
        assert circle_residual(koranyi_metric(m + 1), pts) <= 1e-9


def test_unit_r_circle_meets_central_fiber_twice():
    P = unit_r_circle().sample(4096)
    r = np.abs(P[:, 0] + 1j * P[:, 1])
    # sign changes of Re z at small |z| mark the two passes through the fiber
    near = r < 0.05
    assert near[0] and near[len(P) // 2]
    assert np.count_nonzero(np.diff(near.astype(int)) == 1) + int(near[0] and not near[-1]) == 2


def test_r_circle_through_rejects_non_concyclic():
    with pytest.raises(DegenerateTriple):
        r_circle_through(pack([0j], 0.0), pack([1 + 0j], 0.0), pack([0.5 + 0.5j], 3.0))


def test_c_circle_examples():
    fiber = c_circle_through(pack([0j], 0.0), pack([0j], 5.0))
    P = fiber.sample(16)
    finite = P[np.all(np.isfinite(P), axis=-1)]
    assert np.array_equal(finite[:, :2], np.zeros_like(finite[:, :2]))
    c = c_circle_through(ExtendedPoint.finite([0, 0, 0]), INF)
    assert c.kind == "C"
    with pytest.raises(CoincidentPoints):
        c_circle_through(INF, INF)


def test_generic_c_circle_passes_through_both_points_and_is_not_ptolemy():
    p, q = pack([1 + 0j], 0.0), pack([0j], 1.0)
    c = c_circle_through(p, q)
    assert np.allclose(c(np.array(0.0)), p, atol=1e-12)
    assert np.allclose(c(np.array(-math.pi)), q, atol=1e-12)
    pts = [ExtendedPoint.finite(x) for x in c.sample(8)[1:]]
    assert circle_residual(koranyi_metric(2), pts) > 1e-3


def test_model_bounds():
    assert heis_model(2).dim == 3 and heis_model(4).base_dim == 6
    with pytest.raises(ValueError):
        heis_model(1)
    with pytest.raises(ValueError):
        heis_model(5)
