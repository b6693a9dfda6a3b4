"""Generator pieces of a beta-net: cap coverings, radial grids and snapped polytopes.

Bodies in John position (``B^n subset K subset n B^n``) are approximated by
the polytope spanned by, for every cap centre ``x_i`` on the sphere of
radius ``n``, the farthest point of the radial grid ``X_{i,m}`` still inside
``K``.  The sandwich ``(1 - theta/n) B^n subset P subset K subset (1 + sigma) P``
is checked exactly and ``sigma`` is compared with the explicit bound
``f(n, m, theta) / (1 - theta/n)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .bodies import TAU_GEO, Polytope
from .directions import circle_directions, fibonacci_sphere, random_directions

VERIFY_SAMPLES = 100_000
COVER_SLACK = 1.2


class NetError(ValueError):
    pass


def spherical_radius(n, theta):
    """Angular radius ``2 arcsin(theta / 2n)`` of a cap of chord radius ``theta`` on ``n S``."""
    return 2.0 * math.asin(theta / (2.0 * n))


@dataclass
class CapCover:
    n: int
    theta: float
    theta_prime: float
    points: np.ndarray
    max_gap: float
    bw_bound: float

    @property
    def count(self):
        return len(self.points)

    def to_json(self):
        return {"n": self.n, "theta": self.theta, "theta_prime": self.theta_prime,
                "count": self.count, "max_gap": self.max_gap, "bw_bound": self.bw_bound}


def _max_angular_gap(units, n, samples=VERIFY_SAMPLES, seed=0):
    """Largest sampled angle from a random direction to its nearest unit vector."""
    rng = np.random.default_rng(seed)
    probe = random_directions(rng, n, samples)
    chord, _ = cKDTree(units).query(probe)
    return float(2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0)).max())


def bw_cap_bound(n, theta_prime, c=1.0):
    """``c n^(3/2) cos t sin^-n t log(2 + n cos^2 t)`` at ``t = theta'``."""
    t = theta_prime
    return c * n ** 1.5 * math.cos(t) * math.sin(t) ** (-n) * math.log(2 + n * math.cos(t) ** 2)


def cap_cover(n, theta, c=1.0, seed=0):
    """Points on ``n S^(n-1)`` whose caps of angular radius ``theta'`` cover the sphere.

    In the plane ``ceil(2 pi / theta')`` equally spaced points.  In space a
    Fibonacci spiral, grown until the sampled covering angle times
    ``COVER_SLACK`` fits inside ``theta'``.
    """
    if n not in (2, 3):
        raise ValueError("cap covers are built for n = 2, 3")
    if not 0 < theta <= 2 * n:
        raise ValueError("theta must lie in (0, 2n]")
    tp = spherical_radius(n, theta)
    bw = bw_cap_bound(n, tp, c) if tp < math.pi / 2 else float("nan")
    if tp >= math.pi:
        units = np.eye(n)[:1]
        return CapCover(n, theta, tp, n * units, math.pi, bw)
    if n == 2:
        k = max(1, math.ceil(2 * math.pi / tp - 1e-12))
        units = circle_directions(k)
        return CapCover(n, theta, tp, n * units, math.pi / k, bw)
    count = max(4, int(4.0 / tp ** 2))
    while True:
        units = fibonacci_sphere(count)
        gap = _max_angular_gap(units, n, seed=seed)
        if gap * COVER_SLACK <= tp:
            return CapCover(n, theta, tp, n * units, gap, bw)
        count = int(count * 1.25) + 1


def radial_grid(x, n, m):
    """``X_{i,m}``: the ``m + 1`` points ``x / n + j (n - 1) x / (m n)``, ``j = 0..m``."""
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - n) > TAU_GEO * n:
        raise ValueError("grid anchor must lie on the sphere of radius n")
    if m < 1:
        raise ValueError("m must be >= 1")
    j = np.arange(m + 1)[:, None]
    return x / n + j * (n - 1) / (m * n) * x


def f_bound(n, m, theta):
    """The explicit outer-approximation error ``f(n, m, theta)``.

    Returns ``(f, asymptotic, envelope)`` with the comparators
    ``2 n theta + (n - 1)/m`` and ``3 n (theta + 1/m)``.
    """
    if n < 2 or m < 1 or not 0 < theta < 1:
        raise ValueError("need n >= 2, m >= 1 and 0 < theta < 1")
    tp = spherical_radius(n, theta)
    s = 1.0 - theta / n
    d = (n - 1) / m

    def acos(x, name):
        if not -1.0 <= x <= 1.0:
            raise ValueError(f"arccos argument out of range in the {name} term: {x}")
        return math.acos(x)

    def tan(x, name):
        if not -math.pi / 2 < x < math.pi / 2:
            raise ValueError(f"tangent argument outside (-pi/2, pi/2) in the {name} term: {x}")
        return math.tan(x)

    def sqrt(x, name):
        if x < 0:
            raise ValueError(f"negative radicand in the {name} term: {x}")
        return math.sqrt(x)

    f = (s * tan(acos((n - theta) / n ** 2, "first tangent") + tp, "first tangent")
         - sqrt(n * n - s * s, "first root")
         + d
         + sqrt((n - d) ** 2 - s * s, "second root")
         - s * tan(acos(s / (n - d), "second tangent") - tp, "second tangent"))
    return f, 2 * n * theta + d, 3 * n * (theta + 1.0 / m)


@dataclass(frozen=True)
class NetParams:
    n: int
    beta: float
    theta: float
    m: int
    ratio: float

    def to_json(self):
        return {"n": self.n, "beta": self.beta, "theta": self.theta, "m": self.m,
                "f_ratio": self.ratio}


def net_params(n, beta):
    """``theta = beta / 7n`` and ``m = floor(7n / beta)``, with condition (7) enforced.

    Any ``beta > 0`` is accepted as long as ``f / (1 - theta/n) <= beta`` holds.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    theta = beta / (7 * n)
    m = math.floor(7 * n / beta)
    if m < 1:
        raise NetError("beta too large: m = floor(7n/beta) is zero")
    try:
        f, _, _ = f_bound(n, m, theta)
    except ValueError as exc:
        raise NetError(f"f(n, m, theta) undefined at beta={beta}: {exc}; use a smaller beta") from None
    ratio = f / (1 - theta / n)
    if ratio > beta:
        raise NetError(f"condition (7) fails: f/(1-theta/n) = {ratio:.6g} > beta = {beta}; "
                       "use a smaller beta")
    return NetParams(n, float(beta), theta, m, ratio)


@dataclass
class SnapResult:
    P: Polytope
    inner_factor: float
    outer_factor: float
    bm_log_bound: float
    bound: float
    params: NetParams

    def to_json(self):
        return {"P": {"vertices": self.P.vertices.tolist()}, "sigma": self.outer_factor,
                "inner_factor": self.inner_factor, "bm_log_bound": self.bm_log_bound,
                "f_ratio": self.bound, "params": self.params.to_json()}


def _radial(K, U):
    """Distance from the origin to the boundary of ``K`` along unit rows of ``U``."""
    if K.is_polytope:
        P = K.as_polytope()
        den = U @ P.normals.T
        with np.errstate(divide="ignore"):
            t = np.where(den > 0, P.offsets / den, np.inf)
        return t.min(axis=1)
    if np.allclose(K.reference_point, 0.0, atol=TAU_GEO):
        return 1.0 / K._gauge0(U)
    lo = np.zeros(len(U))
    hi = np.full(len(U), 2.0 * K.dim)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        inside = K.gauge(U * mid[:, None]) <= 1.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return lo


def _check_john_position(K, n):
    if K.is_polytope:
        P = K.as_polytope()
        inner = float(P.offsets.min())
        outer = float(np.linalg.norm(P.vertices, axis=1).max())
    else:
        dirs = random_directions(np.random.default_rng(0), n, 20_000)
        h = K.support(dirs)
        inner, outer = float(h.min()), float(h.max())
    if inner < 1 - 1e-7 or outer > n + 1e-7:
        raise NetError(f"body is not in John position (inradius {inner:.6g}, outer radius {outer:.6g})")


def snap_to_net(K, params, caps=None):
    """Snap a John-position body to the grid polytope ``P`` and certify the sandwich.

    ``P subset K`` is checked through the gauge of every ``p_i``, the inner
    ball through the facet distances of ``P``.  ``sigma`` is the smallest
    factor with ``K subset (1 + sigma) P``: the largest ratio
    ``h_K(a) / b`` over the facets ``a . x <= b`` of ``P``, minus one.
    """
    n = K.dim
    if params.n != n:
        raise ValueError("parameter dimension does not match the body")
    _check_john_position(K, n)
    caps = caps or cap_cover(n, params.theta)
    U = caps.points / n
    rho = _radial(K, U)
    t = 1.0 + np.floor(np.clip((rho - 1.0) * params.m / (n - 1), 0, params.m) + 1e-12) * (n - 1) / params.m
    # the grid point may overshoot rho by rounding; step back until it is in K
    pts = U * t[:, None]
    out = K.gauge(pts) > 1.0 + TAU_GEO
    while out.any():
        t[out] = np.maximum(t[out] - (n - 1) / params.m, 1.0)
        pts = U * t[:, None]
        out = (K.gauge(pts) > 1.0 + TAU_GEO) & (t > 1.0)
    hull = ConvexHull(pts)
    A, b = hull.equations[:, :-1], -hull.equations[:, -1]
    inner = float(b.min())
    if inner < 1 - params.theta / n - TAU_GEO:
        raise NetError(f"inner ball check failed: facet distance {inner:.9g}")
    sigma = max(float((K.support(A) / b).max()) - 1.0, 0.0)
    if sigma > params.ratio + TAU_GEO:
        raise NetError(f"outer factor {sigma:.6g} exceeds the bound {params.ratio:.6g}")
    P = Polytope(pts[hull.vertices], np.zeros(n))
    return SnapResult(P, inner, sigma, math.log1p(sigma), params.ratio, params)


def net_cardinality_log_bound(n, beta, c=1.0):
    """``log10`` of ``floor(7n/beta) ^ (c 14^n n^(2n+3) beta^-n)``, evaluated in log space."""
    if n < 2 or beta <= 0 or c <= 0:
        raise ValueError("need n >= 2, beta > 0 and c > 0")
    m = math.floor(7 * n / beta)
    if m < 2:
        raise ValueError("beta too large for a meaningful bound")
    log_exp = math.log(c) + n * math.log(14) + (2 * n + 3) * math.log(n) - n * math.log(beta)
    return math.exp(log_exp) * math.log10(m)
