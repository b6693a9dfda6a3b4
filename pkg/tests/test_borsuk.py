import math

import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform

from covfun import PointCloud, conflict_colorable, constant_width_radii_check, hausdorff_distance, mu_n, \
    phi_upper, reuleaux_polygon
from covfun.borsuk import part_diameters
from covfun.directions import circle_directions
from oracles import oracle_colorable


def test_oracle_sanity():
    tri = np.ones((3, 3), dtype=bool) & ~np.eye(3, dtype=bool)
    assert not oracle_colorable(tri, 2) and oracle_colorable(tri, 3)
    c5 = np.zeros((5, 5), dtype=bool)
    for i in range(5):
        c5[i, (i + 1) % 5] = c5[(i + 1) % 5, i] = True
    assert not oracle_colorable(c5, 2) and oracle_colorable(c5, 3)


def test_against_brute_force_oracle():
    rng = np.random.default_rng(2024)
    for trial in range(100):
        n = int(rng.integers(4, 21))
        X = rng.standard_normal((n, 2 if trial % 2 else 3))
        m = int(rng.integers(2, 5))
        r = float(rng.uniform(0.3, 0.95))
        D = squareform(pdist(X))
        adj = D > r * D.max()
        answer, colors = conflict_colorable(X, r, m)
        assert answer == oracle_colorable(adj, m)
        if answer:
            assert colors.max() < m
            assert not np.any(adj & (colors[:, None] == colors[None, :]))


def test_equilateral_two_parts():
    X = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    res = phi_upper(X, 2)
    assert res.r_ratio == 1.0 and res.exact


def test_square_corners():
    X = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert phi_upper(X, 2).r_ratio == pytest.approx(1 / math.sqrt(2))
    assert phi_upper(X, 4).r_ratio == 0.0


def test_reuleaux_triangle_three_parts():
    K = reuleaux_polygon(3)
    X = K.boundary_points(circle_directions(200))
    res = phi_upper(X, 3)
    assert res.r_ratio <= math.sqrt(3) / 2 + 0.01
    d = pdist(X).max()
    assert max(part_diameters(X, res.assignment)) <= res.r_ratio * d + 1e-12
    assert res.to_json()["estimate"] == "sampled"


def test_chain_monotone():
    X = np.random.default_rng(3).standard_normal((60, 2))
    prev = phi_upper(X, 2)
    for m in (3, 4):
        cur = phi_upper(X, m, upper=prev)
        assert cur.r_ratio <= prev.r_ratio
        prev = cur


def test_bad_inputs():
    with pytest.raises(ValueError):
        PointCloud([[0.0, 0.0]])
    with pytest.raises(ValueError):
        conflict_colorable(np.eye(3), -0.1, 2)
    with pytest.raises(ValueError):
        reuleaux_polygon(4)


@pytest.mark.parametrize("k", [3, 5, 7])
def test_constant_width_radii(k):
    ok, r, R, mu = constant_width_radii_check(reuleaux_polygon(k), n=2)
    assert ok
    assert r + R == pytest.approx(1.0, abs=1e-6)
    if k == 3:
        b = math.sqrt(2 / 6)
        assert R == pytest.approx(b, abs=1e-6) and r == pytest.approx(1 - b, abs=1e-6)


def test_non_constant_width_rejected():
    from covfun.bodies import square
    with pytest.raises(ValueError):
        constant_width_radii_check(square())


def test_mu():
    assert mu_n(3) == pytest.approx(1.57980, abs=1e-5)
    assert mu_n(2) == pytest.approx((math.sqrt(12) + 2) / 4)


def test_hausdorff_converges():
    from covfun import LpBall
    d = [hausdorff_distance(reuleaux_polygon(k), reuleaux_polygon(k + 2)) for k in (5, 11, 19)]
    assert d[0] > d[1] > d[2] > 0
    assert hausdorff_distance(LpBall(2, 2), LpBall(2, 2)) == 0.0
