import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covfun import (Cone, DegenerateBodyError, HPolytope, LpBall, ReuleauxPolygon, VPolytope,
                    body_from_json, convert, diameter, euclidean_radii, volume)
from covfun.bodies import random_polygon, regular_tetrahedron, square, triangle

vec3 = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3)
scal = st.floats(0.0, 5.0, allow_nan=False)


def bodies3():
    return [LpBall(1, 3), LpBall(2, 3), LpBall(4, 3), LpBall(math.inf, 3), regular_tetrahedron(),
            Cone(square(), [0.0, 0.0, 1.0])]


def test_square_gauge_and_support():
    Q = square()
    assert Q.gauge([0.5, 0.25]) == pytest.approx(0.5)
    assert Q.gauge([2.0, -1.0]) == pytest.approx(2.0)
    assert Q.support([1.0, 1.0]) == pytest.approx(2.0)
    assert Q.support([0.0, -3.0]) == pytest.approx(3.0)


@pytest.mark.parametrize("p, pt, g", [(1, [0.5, 0.5, 0], 1.0), (2, [0.6, 0.8, 0], 1.0),
                                      (math.inf, [0.3, -0.9, 0.1], 0.9), (4, [0.5, 0, 0], 0.5)])
def test_lpball_gauge(p, pt, g):
    assert LpBall(p, 3).gauge(pt) == pytest.approx(g)


def test_lpball_support_is_dual_norm():
    u = np.array([1.0, 2.0, -2.0])
    assert LpBall(1, 3).support(u) == pytest.approx(2.0)
    assert LpBall(2, 3).support(u) == pytest.approx(3.0)
    assert LpBall(math.inf, 3).support(u) == pytest.approx(5.0)
    q = 4 / 3
    assert LpBall(4, 3).support(u) == pytest.approx(np.sum(np.abs(u) ** q) ** (1 / q))


@settings(max_examples=60, deadline=None)
@given(vec3, scal)
def test_gauge_positively_homogeneous(x, t):
    x = np.array(x)
    for K in bodies3():
        assert K.gauge0(t * x) == pytest.approx(t * K.gauge0(x), rel=1e-7, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(vec3, vec3)
def test_gauge_subadditive(x, y):
    x, y = np.array(x), np.array(y)
    for K in bodies3():
        assert K.gauge0(x + y) <= K.gauge0(x) + K.gauge0(y) + 1e-7


@settings(max_examples=40, deadline=None)
@given(vec3)
def test_support_matches_boundary_points(u):
    u = np.array(u)
    if np.linalg.norm(u) < 1e-3:
        return
    U = np.random.default_rng(0).standard_normal((4000, 3))
    for K in bodies3():
        B = K.boundary_points(U)
        # boundary points never exceed the support value
        assert (B @ u).max() <= K.support(u) + 1e-7


def test_polytope_roundtrip_and_conversion():
    P = random_polygon(np.random.default_rng(3), 7)
    H = convert(P)
    assert isinstance(H, HPolytope)
    V = convert(H)
    pts = np.random.default_rng(1).uniform(-1, 1, (200, 2))
    assert np.allclose(P.gauge(pts), V.gauge(pts), atol=1e-9)
    Q = body_from_json(P.to_json())
    assert np.allclose(Q.gauge(pts), P.gauge(pts), atol=1e-12)


def test_degenerate_polytope_rejected():
    with pytest.raises((DegenerateBodyError, ValueError)):
        VPolytope([[0, 0], [1, 0], [2, 0]])


def test_volumes():
    assert volume(square()) == pytest.approx(4.0)
    assert volume(triangle()) == pytest.approx(3 * math.sqrt(3) / 4)
    assert volume(LpBall(2, 3)) == pytest.approx(4 * math.pi / 3)
    assert volume(LpBall(1, 3)) == pytest.approx(4 / 3)
    assert volume(Cone(square(), [0, 0, 1])) == pytest.approx(4 / 3)


def test_diameters_and_radii():
    assert diameter(square()) == pytest.approx(2 * math.sqrt(2))
    assert diameter(LpBall(math.inf, 3)) == pytest.approx(2 * math.sqrt(3))
    assert diameter(ReuleauxPolygon(3)) == pytest.approx(1.0)
    r, _, R, _ = euclidean_radii(triangle())
    assert r == pytest.approx(0.5, abs=1e-9)
    assert R == pytest.approx(1.0, abs=1e-6)


def test_reuleaux_constant_width():
    K = ReuleauxPolygon(5)
    U = np.random.default_rng(2).standard_normal((500, 2))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    assert np.allclose(K.support(U) + K.support(-U), 1.0, atol=1e-9)


def test_zero_direction_rejected():
    with pytest.raises(ValueError):
        square().support([0.0, 0.0])
