import math
from fractions import Fraction

import numpy as np
import pytest

from covfun import LpBall, arc_covered, beta_for_gap, cone_cover_thm1, levi_c, lpball_cover_thm2, \
    rogers_zong_bound, thm2_inequalities, verify_cover
from covfun.bodies import Cone, random_polygon, regular_polygon, square, triangle, VPolytope
from covfun.covering.constructions import base_slice_translates, known_config, thm2_equality_at_2
from covfun.hexagon import inscribe_affine_hexagon


def _unit(deg):
    a = math.radians(deg)
    return np.array([math.cos(a), math.sin(a)])


def test_disc_arc_covered_by_large_homothet():
    D = LpBall(2, 2)
    x1, x2, x3 = _unit(0), _unit(30), _unit(60)
    assert arc_covered(D, x1, x2, x3, 0.9, 0.2 * _unit(30))


def test_disc_arc_not_covered_by_small_homothet():
    D = LpBall(2, 2)
    assert not arc_covered(D, _unit(0), _unit(30), _unit(60), 0.1, np.zeros(2))


def test_arc_rejects_bad_input():
    D = LpBall(2, 2)
    with pytest.raises(ValueError):
        arc_covered(D, 0.5 * _unit(0), _unit(30), _unit(60), 0.9, np.zeros(2))
    with pytest.raises(ValueError):
        arc_covered(D, _unit(0), _unit(90), _unit(60), 0.9, np.zeros(2))


def test_hexagon_vertex_pair_in_small_homothet():
    D = regular_polygon(6)
    H = inscribe_affine_hexagon(D)
    v, mids = H.vertices, H.edge_midpoints
    pair = np.array([(2 / 3) * v[0], (2 / 3) * v[1]])
    # (1/3) D + (2/3) m_1, membership by the gauge of D
    g = D.gauge((pair - (2 / 3) * mids[0]) / (1 / 3))
    assert np.all(g <= 1 + 1e-9)


def test_base_slice_covers_hexagon_base():
    C = Cone(regular_polygon(6), [0, 0, 1])
    cfg = base_slice_translates(C)
    assert cfg.m == 7
    assert verify_cover(C.base, cfg.with_ratio(2 / 3 + 1e-6)).covered


@pytest.mark.parametrize("base", [square(), regular_polygon(6)])
def test_cone_cover_verifies(base):
    C = Cone(base, [0, 0, 1])
    cfg = cone_cover_thm1(C)
    assert cfg.m == 8 and cfg.r == pytest.approx(2 / 3)
    assert verify_cover(C, cfg.with_ratio(2 / 3 + 1e-6), time_limit=120).covered


def test_ball_cover_centres():
    c1 = lpball_cover_thm2(1)
    assert c1.m == 6 and np.allclose(np.abs(c1.centers).sum(axis=1), 1 / 3)
    c2 = lpball_cover_thm2(2)
    assert c2.m == 8 and np.allclose(np.abs(c2.centers), 1 / 3)
    assert c2.r == pytest.approx(math.sqrt(2 / 3))
    assert lpball_cover_thm2(math.inf).m == 8


def test_octahedron_axis_cover():
    assert verify_cover(LpBall(1, 3), lpball_cover_thm2(1).with_ratio(math.sqrt(2 / 3) + 1e-4)).covered


def test_inequalities():
    assert thm2_equality_at_2() == (Fraction(2, 3), Fraction(2, 3))
    assert thm2_inequalities(2) == (True, True)
    assert thm2_inequalities(4) == (True, True)
    assert thm2_inequalities(math.inf) == (True, True)
    for p in np.linspace(2, 64, 50):
        assert thm2_inequalities(p) == (True, True)
    with pytest.raises(ValueError):
        thm2_inequalities(1.5)


def test_levi():
    assert levi_c(square()) == 4
    assert levi_c(VPolytope([[0, 0], [2, 0], [3, 1], [1, 1]])) == 4
    assert levi_c(triangle()) == 3
    assert levi_c(LpBall(2, 2)) == 3
    assert levi_c(VPolytope([[0, 0], [2, 0], [3, 1], [0.5, 1]])) == 3


def test_rogers_zong():
    assert rogers_zong_bound(3) == 372
    assert rogers_zong_bound(3, symmetric=True) == 149
    assert rogers_zong_bound(2) < rogers_zong_bound(3)
    for n in range(2, 8):
        assert rogers_zong_bound(n, True) <= rogers_zong_bound(n)
    with pytest.raises(ValueError):
        rogers_zong_bound(1)


def test_beta_for_gap():
    assert beta_for_gap(math.sqrt(2 / 3)) == pytest.approx(0.08779, abs=1e-5)
    assert beta_for_gap(0.5) == pytest.approx(math.log(1.25))
    assert beta_for_gap(1 - 1e-9) < 1e-9
    with pytest.raises(ValueError):
        beta_for_gap(1.0)


def test_known_config_sizes():
    assert known_config(LpBall(1, 3), 8).m == 6
    assert known_config(LpBall(2, 3), 7) is None
    assert known_config(random_polygon(np.random.default_rng(0), 5), 8) is None
