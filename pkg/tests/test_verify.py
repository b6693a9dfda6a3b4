import math

import numpy as np
import pytest

from covfun import CoverConfig, LpBall, SearchBudget, gamma_upper, verify_cover
from covfun.bodies import AffineImage, VPolytope, random_polygon, square, triangle
from covfun.covering.verify import COVERED, UNCOVERED, UNKNOWN

SQUARE4 = np.array([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]])


def covered_by(K, cfg, pts):
    """Sample oracle: is each point in some translate ``x_i + ref + r (K - ref)``?"""
    ref = K.reference_point
    g = np.stack([K.gauge0(pts - ref - x) for x in cfg.centers])
    return g.min(axis=0) <= cfg.r * (1 + 1e-9)


def sample_inside(K, n, seed=0):
    rng = np.random.default_rng(seed)
    h = K.support(np.vstack([np.eye(K.dim), -np.eye(K.dim)]))
    lo, hi = -h[K.dim:], h[:K.dim]
    pts = rng.uniform(lo, hi, (4 * n, K.dim))
    return pts[K.gauge(pts) <= 1][:n]


def test_square_four_quarters():
    cert = verify_cover(square(), CoverConfig(0.5 + 1e-6, SQUARE4))
    assert cert.verdict == COVERED and cert.exit_code == 0


def test_square_four_quarters_too_small():
    cert = verify_cover(square(), CoverConfig(0.49, SQUARE4))
    assert cert.verdict == UNCOVERED and cert.exit_code == 1
    K = square()
    assert K.gauge(cert.witness) <= 1 + 1e-9
    # the witness really is outside every translate
    assert not covered_by(K, CoverConfig(0.49, SQUARE4), cert.witness[None, :])[0]
    g = min(K.gauge0(cert.witness - x) for x in SQUARE4)
    assert g >= 0.49 + cert.margin


def test_single_translate_full_ratio():
    assert verify_cover(triangle(), CoverConfig(1.0, [[0.0, 0.0]])).covered
    assert verify_cover(LpBall(2, 2), CoverConfig(1.0, [[0.3, 0.0], [0.0, 0.0]])).covered


def test_budget_exhaustion_is_unknown():
    cert = verify_cover(square(), CoverConfig(0.5, SQUARE4), max_cells=50)
    assert cert.verdict == UNKNOWN and cert.exit_code == 2


def test_bad_inputs():
    with pytest.raises(ValueError):
        CoverConfig(1.5, [[0, 0]])
    with pytest.raises(ValueError):
        verify_cover(square(), CoverConfig(0.5, [[0, 0, 0]]))
    with pytest.raises(ValueError):
        CoverConfig(0.8, [[0, 0]]).scaled(1.5)


def quick_cover(K, m, seconds=6.0, seed=0):
    return gamma_upper(K, m, SearchBudget(max_time=seconds, seed=seed)).config


@pytest.mark.parametrize("seed", range(8))
def test_verdicts_survive_dense_sampling(seed):
    rng = np.random.default_rng(seed)
    K = random_polygon(rng, 6)
    base = quick_cover(K, 4, seed=seed)
    pts = sample_inside(K, 100_000, seed)
    for r in (base.r, 0.97 * base.r):
        cfg = base.with_ratio(r)
        cert = verify_cover(K, cfg, time_limit=30)
        if cert.verdict == COVERED:
            assert covered_by(K, cfg, pts).all()
        elif cert.verdict == UNCOVERED:
            assert K.gauge(cert.witness) <= 1 + 1e-9
            assert not covered_by(K, cfg, cert.witness[None, :])[0]
    assert base.r < 1 and verify_cover(K, base).covered


def test_smooth_cover_survives_dense_sampling():
    K = LpBall(2, 2)
    ang = 2 * math.pi * np.arange(6) / 6
    ring = 0.55 * np.column_stack([np.cos(ang), np.sin(ang)])
    cfg = CoverConfig(0.52, np.vstack([[0, 0], ring]))
    cert = verify_cover(K, cfg, time_limit=60)
    pts = sample_inside(K, 100_000)
    assert covered_by(K, cfg, pts).all() == (cert.verdict == COVERED) or cert.verdict == UNKNOWN


def test_monotone_in_ratio():
    K = random_polygon(np.random.default_rng(11), 7)
    X = np.random.default_rng(2).uniform(-0.4, 0.4, (5, 2))
    verdicts = [verify_cover(K, CoverConfig(r, X), time_limit=30).verdict for r in (0.5, 0.6, 0.7, 0.8, 0.9)]
    first = next((i for i, v in enumerate(verdicts) if v == COVERED), len(verdicts))
    assert all(v == COVERED for v in verdicts[first:])


def test_affine_invariance():
    K = square()
    A = np.array([[2.0, 0.5], [0.3, 1.2]])
    cfg = CoverConfig(0.5 + 1e-6, SQUARE4)
    img = AffineImage(A, np.array([1.0, -2.0]), K)
    assert verify_cover(img, cfg.transformed(A)).covered
    assert verify_cover(img, cfg.with_ratio(0.49).transformed(A)).verdict == UNCOVERED


@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1])
def test_transfer_to_enlarged_body(eps):
    rng = np.random.default_rng(int(eps * 1000))
    K = random_polygon(rng, 6)
    cfg = quick_cover(K, 4)
    assert cfg.r * (1 + eps) <= 1
    # K subset K' subset (1 + eps) K, all about the shared anchor
    pts = K.vertices * rng.uniform(1.0, 1 + eps, (len(K.vertices), 1))
    K2 = VPolytope(np.vstack([K.vertices, pts]), K.reference_point)
    assert verify_cover(K2, cfg.scaled(1 + eps), time_limit=60).covered
