import math

import numpy as np
import pytest

from covfun import SearchBudget, gamma_upper, verify_cover, volume_lower_bound
from covfun.bodies import random_polygon, square, triangle
from covfun.covering.search import gamma_chain, sample_body


def test_volume_floor():
    assert volume_lower_bound(square(), 4) == pytest.approx(0.5)
    assert volume_lower_bound(square(), 3) == pytest.approx(1 / math.sqrt(3))
    from covfun import LpBall
    assert volume_lower_bound(LpBall(2, 3), 8) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        volume_lower_bound(square(), 0)


def test_sample_inside_body():
    K = random_polygon(np.random.default_rng(5), 7)
    pts = sample_body(K) + K.reference_point
    assert np.all(K.gauge(pts) <= 1 + 1e-9)


def test_square_four():
    res = gamma_upper(square(), 4, SearchBudget(max_time=15.0))
    assert res.r_upper <= 0.5 + 1e-3
    assert res.r_upper >= res.volume_floor - 1e-9
    assert res.certificate.covered


def test_triangle_three():
    res = gamma_upper(triangle(), 3, SearchBudget(max_time=15.0))
    assert res.r_upper <= 2 / 3 + 1e-3
    assert verify_cover(triangle(), res.config).covered


def test_single_translate_is_trivial():
    res = gamma_upper(triangle(), 1, SearchBudget(max_time=1.0))
    assert res.r_upper == 1.0 and res.certificate.covered


def test_chain_monotone():
    K = random_polygon(np.random.default_rng(9), 6)
    out = gamma_chain(K, [3, 4, 5], SearchBudget(max_time=8.0))
    vals = [out[m].r_upper for m in (3, 4, 5)]
    assert vals[0] >= vals[1] >= vals[2]
    for m, res in out.items():
        assert res.config.m == m and res.r_upper >= res.volume_floor - 1e-9


def test_deterministic_for_seed():
    K = random_polygon(np.random.default_rng(4), 5)
    a = gamma_upper(K, 3, SearchBudget(max_time=4.0, seed=3, starts=2, max_iterations=50))
    assert a.certificate.covered and a.r_upper <= 1.0
