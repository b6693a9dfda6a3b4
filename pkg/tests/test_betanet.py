import math

import mpmath
import numpy as np
import pytest

from covfun import LpBall, cap_cover, f_bound, john_normalize, net_cardinality_log_bound, net_params, \
    radial_grid, snap_to_net
from covfun.betanet import NetError, spherical_radius
from covfun.bodies import AffineImage, random_polytope3, square


def test_planar_cap_counts():
    # theta' = pi/3 on the circle of radius 2
    assert cap_cover(2, 2.0).count == 6
    assert cap_cover(2, 4.0).count == 1
    caps = cap_cover(2, 0.1)
    assert caps.count == math.ceil(2 * math.pi / caps.theta_prime)


def test_spatial_caps_cover_sphere():
    caps = cap_cover(3, 0.5)
    assert caps.count <= 600
    assert np.allclose(np.linalg.norm(caps.points, axis=1), 3, atol=1e-9)
    U = np.random.default_rng(42).standard_normal((100_000, 3))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    C = caps.points / 3
    ang = np.arccos(np.clip((U @ C.T).max(axis=1), -1, 1))
    assert ang.max() <= caps.theta_prime


def test_spherical_radius():
    assert spherical_radius(3, 6.0) == pytest.approx(math.pi)
    assert spherical_radius(2, 2.0) == pytest.approx(math.pi / 3)


def test_radial_grid():
    g = radial_grid([3.0, 0, 0], 3, 2)
    assert np.allclose(g, [[1, 0, 0], [2, 0, 0], [3, 0, 0]])
    x = 3 * np.array([1.0, 2.0, 2.0]) / 3
    g = radial_grid(x, 3, 7)
    nrm = np.linalg.norm(g, axis=1)
    assert nrm[0] == pytest.approx(1) and nrm[-1] == pytest.approx(3)
    assert np.allclose(np.diff(nrm), 2 / 7)
    with pytest.raises(ValueError):
        radial_grid([1.0, 0, 0], 3, 2)


def test_f_bound_examples():
    f, asym, env = f_bound(3, 10_000, 0.001)
    assert asym == pytest.approx(0.0062)
    assert abs(f - asym) <= 0.2 * asym
    assert f_bound(3, 1000, 0.01)[0] > f_bound(3, 10_000, 0.01)[0]
    assert f_bound(3, 100_000, 1e-4)[0] / (1 - 1e-4 / 3) < 1e-3


def test_f_bound_envelope():
    for n in (2, 3):
        for theta in np.linspace(1e-4, 0.01, 12):
            for m in (1000, 5000, 20000, 10 ** 5):
                f, _, env = f_bound(n, m, theta)
                assert f < env


def test_f_bound_domain_error_names_term():
    with pytest.raises(ValueError, match="first tangent"):
        f_bound(3, 1, 0.99)
    with pytest.raises(ValueError):
        f_bound(3, 10, 1.5)


def test_net_params():
    p = net_params(3, 0.1)
    assert p.theta == pytest.approx(0.1 / 21) and p.m == 210
    assert p.ratio <= 0.1
    q = net_params(2, 0.2)
    assert q.theta == pytest.approx(0.2 / 14) and q.m == 70
    with pytest.raises(NetError):
        net_params(3, 20.0)
    with pytest.raises(NetError):
        net_params(3, 30.0)


def test_snap_ball_and_outer_ball():
    params = net_params(2, 0.2)
    r = snap_to_net(LpBall(2, 2), params)
    assert np.allclose(np.linalg.norm(r.P.vertices, axis=1), 1, atol=1e-9)
    assert r.inner_factor >= 1 - params.theta / 2 - 1e-9
    big = snap_to_net(AffineImage(2 * np.eye(2), np.zeros(2), LpBall(2, 2)), params)
    assert np.allclose(np.linalg.norm(big.P.vertices, axis=1), 2, atol=1e-9)
    assert big.outer_factor <= params.ratio + 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_snap_random_polytope(seed):
    _, K = john_normalize(random_polytope3(np.random.default_rng(seed), 16))
    params = net_params(3, 0.5)
    r = snap_to_net(K, params)
    assert np.all(K.gauge(r.P.vertices) <= 1 + 1e-9)
    assert r.bm_log_bound <= 0.5
    # sigma re-measured from the outside on random directions never exceeds the exact value
    U = np.random.default_rng(seed).standard_normal((20_000, 3))
    assert (K.support(U) / r.P.support(U)).max() - 1 <= r.outer_factor + 1e-9


def test_snap_requires_john_position():
    with pytest.raises(NetError):
        snap_to_net(square(0.5), net_params(2, 0.2))


def test_cardinality_matches_high_precision():
    mpmath.mp.dps = 40
    n, beta = 3, mpmath.mpf("0.1")
    expo = mpmath.mpf(14) ** n * mpmath.mpf(n) ** (2 * n + 3) * beta ** (-n)
    ref = expo * mpmath.log10(mpmath.floor(7 * n / beta))
    got = net_cardinality_log_bound(3, 0.1, 1)
    assert float(ref) == pytest.approx(1.2542e11, rel=1e-3)
    assert got == pytest.approx(float(ref), rel=1e-6)


def test_cardinality_monotone_and_linear():
    assert net_cardinality_log_bound(3, 0.2) < net_cardinality_log_bound(3, 0.1)
    assert net_cardinality_log_bound(3, 0.1, 2.0) == pytest.approx(2 * net_cardinality_log_bound(3, 0.1))
