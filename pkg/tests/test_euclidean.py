import math

import numpy as np
import pytest
from hypothesis import given

from moebius.core import INF, ExtendedPoint, circle_residual, cross_ratio, m_invert, moebius_residual, ptolemy_scan, pullback
from moebius.errors import DegenerateTriple, MapUndefinedAt, RadiusNonPositive
from moebius.euclidean import (
    chordal_metric,
    circle_through,
    euclid_inversion,
    euclidean_metric,
    euclidean_model,
    similarity,
    stereographic_lift,
)

from .strategies import batches, min_separation


def P(*c):
    return ExtendedPoint.finite(c)


def test_model_distances():
    m = euclidean_model(1)
    assert m.metric(P(0.0), P(3.0)) == 3.0
    assert m.metric(P(0.0), INF) == math.inf
    with pytest.raises(ValueError):
        euclidean_model(0)


def test_model_ptolemy_scan_has_no_violation():
    m = euclidean_model(3)
    rep = ptolemy_scan(m.metric, m.sample, 10_000, 3)
    assert rep.counts["violation"] == 0


def test_stereographic_lift_lands_on_unit_sphere(rng):
    S = stereographic_lift(rng.normal(size=(100, 3)) * 5)
    assert np.allclose(np.linalg.norm(S, axis=-1), 1.0, atol=1e-15)


def test_chordal_examples():
    dc = chordal_metric(2)
    # 0 lifts to the south pole and infinity is the north pole
    south, north = np.array([0, 0, -1.0]), np.array([0, 0, 1.0])
    assert dc(P(0, 0), INF) == pytest.approx(np.linalg.norm(south - north))
    assert dc(P(0, 0), INF) == pytest.approx(2.0)
    assert dc(P(1.5, 2.0), P(1.5, 2.0)) == 0.0
    assert dc(INF, INF) == 0.0


def test_chordal_is_moebius_equivalent_to_euclidean(rng):
    quads = rng.normal(size=(1000, 4, 2)) * 3
    e, c = euclidean_metric(2), chordal_metric(2)
    worst = max(cross_ratio(e, q).distance(cross_ratio(c, q)) for q in quads)
    assert worst <= 1e-10


def test_circle_through_three_points():
    c = circle_through(P(1, 0), P(0, 1), P(-1, 0))
    assert np.allclose(c.center, 0, atol=1e-15)
    assert c.radius == pytest.approx(1.0)


def test_circle_through_infinity_is_a_line():
    c = circle_through(P(0.0), P(1.0), INF)
    assert c.is_line
    pts = c.sample(9)
    assert INF in pts
    assert circle_residual(euclidean_metric(1), pts) <= 1e-12


def test_circle_through_collinear_points_is_a_line():
    assert circle_through(P(0, 0), P(1, 1), P(3, 3)).is_line


def test_circle_through_degenerate():
    with pytest.raises(DegenerateTriple):
        circle_through(P(0, 0), P(0, 0), P(1, 0))
    with pytest.raises(DegenerateTriple):
        circle_through(P(0, 0), INF, INF)


@given(batches(3, 3))
def test_circle_through_random_triple_is_ptolemy(T):
    if min_separation(T) < 1e-2:
        return
    c = circle_through(*(P(*t) for t in T))
    if c.is_line or c.radius > 1e3:
        return
    for t in T:
        # the defining points lie on the circle
        assert abs(np.linalg.norm(t - c.center) - c.radius) <= 1e-9 * max(1.0, c.radius)
    assert circle_residual(euclidean_metric(3), c.sample(12)) <= 1e-10


def test_circle_csv_columns():
    text = circle_through(P(1, 0), P(0, 1), P(-1, 0)).to_csv(4)
    lines = text.splitlines()
    assert lines[0] == "angle,x1,x2"
    assert len(lines) == 5


def test_inversion_examples():
    f = euclid_inversion(P(0.0), 1.0)
    assert f(P(2.0)) == P(0.5)
    assert f(P(0.0)) is INF
    assert f(INF) == P(0.0)
    with pytest.raises(RadiusNonPositive):
        euclid_inversion(P(0.0), -1.0)
    with pytest.raises(MapUndefinedAt):
        euclid_inversion(INF, 1.0)


def test_inversion_is_an_involution(rng):
    f = euclid_inversion(P(0.3, -1.0, 2.0), 1.7)
    X = rng.normal(size=(200, 3))
    assert np.allclose(f.apply(f.apply(X)), X, rtol=1e-12, atol=1e-12)


def test_inversion_pullback_is_m_inversion(rng):
    c, r = P(0.5, 0.25), 2.0
    d = euclidean_metric(2)
    pb, mi = pullback(d, euclid_inversion(c, r)), m_invert(d, c, r)
    X, Y = rng.normal(size=(2, 1000, 2))
    assert np.max(np.abs(pb.pair(X, Y) / mi.pair(X, Y) - 1)) <= 1e-12


def test_similarity_is_moebius(rng):
    th = 0.7
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    f = similarity(2.5, R, np.array([1.0, -3.0]))
    quads = rng.normal(size=(500, 4, 2))
    assert moebius_residual(euclidean_metric(2), f, quads) <= 1e-12
    X = rng.normal(size=(10, 2))
    assert np.allclose(f.inverse(f(P(*X[0]))).array, X[0])


def test_model_protocol():
    m = euclidean_model(2)
    line = m.line([1.0, 1.0], [3.0, 4.0])
    assert np.allclose(line.direction, [0.6, 0.8])
    assert np.allclose(line(2.0), [2.2, 2.6])
    t, rho = line.foot(np.array([1.0, 1.0]) + 2 * np.array([-0.8, 0.6]))
    assert t == pytest.approx(0.0, abs=1e-15) and rho == pytest.approx(2.0)
    W = m.walk(m.origin, np.ones((3, 2)))
    assert np.array_equal(W[-1], [3.0, 3.0])
