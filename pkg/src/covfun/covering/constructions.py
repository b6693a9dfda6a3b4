"""Explicit coverings and closed-form quantities around Hadwiger's problem."""

import math
from fractions import Fraction

import numpy as np

from ..bodies import TAU_GEO
from ..hexagon import inscribe_affine_hexagon
from .verify import CoverConfig

SQRT_2_3 = math.sqrt(2.0 / 3.0)


def cone_cover_thm1(C):
    """Eight translates of ``(2/3) C`` covering a cone ``C`` over a planar body.

    With ``o`` the centre of an inscribed affine regular hexagon of the base,
    the homothets are ``o + (2/3)(C - o) + (2/3)(m_i - o)`` where ``m_0 = o``,
    ``m_1..m_6`` are the hexagon edge midpoints and ``m_7`` is the midpoint of
    ``o`` and the apex.  Centers are returned relative to ``C.reference_point``.
    """
    H = inscribe_affine_hexagon(C.base)
    o = np.append(H.center, 0.0)
    mids = np.column_stack([H.edge_midpoints, np.zeros(6)])
    m = np.vstack([o, mids, 0.5 * (o + C.apex)])
    r = 2.0 / 3.0
    centers = r * (m - o) + (1 - r) * (o - C.reference_point)
    return CoverConfig(r, centers)


def base_slice_translates(C):
    """The seven planar homothets ``(2/3) D + (2/3) m_i`` covering the base ``D``.

    Returned as a planar config relative to the base reference point.
    """
    H = inscribe_affine_hexagon(C.base)
    o = H.center
    m = np.vstack([o, H.edge_midpoints])
    r = 2.0 / 3.0
    return CoverConfig(r, r * (m - o) + (1 - r) * (o - C.base.reference_point))


def lpball_cover_thm2(p):
    """Translates of ``sqrt(2/3) K_p`` covering the unit ``l_p`` ball in space.

    Six axis translates ``+-(1/3)^(1/p) e_i`` for ``p < 2``; the eight
    ``(+-1/3, +-1/3, +-1/3)`` for ``p >= 2`` (both work at ``p = 2``).
    """
    p = float(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    if p < 2:
        c = (1.0 / 3.0) ** (1.0 / p)
        E = np.eye(3) * c
        return CoverConfig(SQRT_2_3, np.vstack([E, -E]))
    s = 1.0 / 3.0
    centers = np.array([[a, b, c] for a in (s, -s) for b in (s, -s) for c in (s, -s)])
    return CoverConfig(SQRT_2_3, centers)


def thm2_inequality_values(p):
    """Log-space margins ``log(rhs) - log(lhs)`` of the two scalar inequalities.

    ``(2/3)^p + 2 (1/3)^p <= (2/3)^(p/2)`` and
    ``3 ((1/3)^(1/p) - 1/3)^p <= (2/3)^(p/2)``.  At ``p = inf`` both sides
    tend to zero and the margins are returned as the leading coefficients of
    the linear rates in ``p`` (positive means the inequality holds).
    """
    p = float(p)
    l23 = math.log(2.0 / 3.0)
    if math.isinf(p):
        # lhs ~ exp(p log(2/3)), rhs ~ exp(p log(2/3) / 2)
        return 0.5 * l23 - l23, 0.5 * l23 - l23
    first = 0.5 * p * l23 - (p * l23 + math.log1p(2.0 ** (1.0 - p)))
    base = (1.0 / 3.0) ** (1.0 / p) - 1.0 / 3.0
    second = 0.5 * p * l23 - (math.log(3.0) + p * math.log(base))
    return first, second


def thm2_inequalities(p):
    """Whether both scalar inequalities hold at ``p`` (in ``[2, inf]``).

    Even integer ``p`` is evaluated exactly in rationals, so ``p = 2`` gives
    the equality ``4/9 + 2/9 = 2/3`` without rounding.
    """
    p = float(p)
    if p < 2:
        raise ValueError("the inequalities are stated for p >= 2")
    if not math.isinf(p) and p == int(p) and int(p) % 2 == 0:
        k = int(p)
        lhs1 = Fraction(2, 3) ** k + 2 * Fraction(1, 3) ** k
        rhs = Fraction(2, 3) ** (k // 2)
        first = lhs1 <= rhs
        _, second_margin = thm2_inequality_values(p)
        return first, second_margin >= -1e-12
    first, second = thm2_inequality_values(p)
    return first >= -1e-12, second >= -1e-12


def thm2_equality_at_2():
    """Both sides of the first inequality at ``p = 2`` as exact fractions."""
    lhs = Fraction(2, 3) ** 2 + 2 * Fraction(1, 3) ** 2
    rhs = Fraction(2, 3)
    return lhs, rhs


def _angle(D, x):
    v = np.asarray(x, dtype=float) - D.reference_point
    return math.atan2(v[1], v[0])


def arc_covered(D, x1, x2, x3, lam, y, samples=100):
    """Do ``x1, x2, x3`` (counter-clockwise on the boundary of ``D``) lie in ``lam D + y``?

    When they do, the whole boundary arc from ``x1`` through ``x2`` to ``x3``
    lies in the homothet; ``samples`` points of that arc are spot-checked and
    a failure raises ``RuntimeError``, since it could only come from a bug.
    """
    if D.dim != 2:
        raise ValueError("arc coverage is a planar statement")
    if not 0 < lam < 1:
        raise ValueError("lam must lie in (0, 1)")
    pts = np.array([x1, x2, x3], dtype=float)
    g = D.gauge(pts)
    if np.any(np.abs(g - 1.0) > TAU_GEO * 100):
        raise ValueError("points must lie on the boundary")
    a1, a2, a3 = (_angle(D, x) for x in pts)
    span = (a3 - a1) % (2 * math.pi)
    pos = (a2 - a1) % (2 * math.pi)
    if not 0 < pos < span:
        raise ValueError("points are not in counter-clockwise boundary order")
    y = np.asarray(y, dtype=float)

    def inside(p):
        return D.gauge((np.atleast_2d(p) - y) / lam) <= 1.0 + TAU_GEO

    ok = bool(np.all(inside(pts)))
    if ok:
        ang = a1 + span * np.linspace(0, 1, samples)
        arc = D.boundary_points(np.column_stack([np.cos(ang), np.sin(ang)]))
        if not np.all(inside(arc)):
            raise RuntimeError("arc sample outside the homothet although its three anchors are inside")
    return ok


def levi_c(D):
    """Covering number of a planar convex body: 4 for parallelograms, otherwise 3."""
    if D.dim != 2:
        raise ValueError("Levi's classification is planar")
    if not D.is_polytope:
        return 3
    v = D.as_polytope().vertices
    if len(v) != 4:
        return 3
    scale = max(1.0, float(np.abs(v).max()))
    return 4 if np.abs((v[0] + v[2]) - (v[1] + v[3])).max() <= TAU_GEO * scale else 3


def rogers_zong_bound(n, symmetric=False):
    """Ceiling of ``C (n ln n + n ln ln n + 5 n)`` with ``C = binom(2n, n)`` or ``2^n``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    lead = 2 ** n if symmetric else math.comb(2 * n, n)
    return math.ceil(lead * (n * math.log(n) + n * math.log(math.log(n)) + 5 * n))


def beta_for_gap(c_n):
    """Banach-Mazur radius ``log(1 + (1 - c_n)/2)`` keeping ``gamma`` within half the gap to 1."""
    if not 0 < c_n < 1:
        raise ValueError("c_n must lie in (0, 1)")
    return math.log1p((1.0 - c_n) / 2.0)


def cube_octant_config():
    """Eight octant translates of ``K_inf / 2``: the cube even admits ratio 1/2."""
    s = 0.5
    centers = np.array([[a, b, c] for a in (s, -s) for b in (s, -s) for c in (s, -s)])
    return CoverConfig(0.5, centers)


def known_config(K, m):
    """An explicit covering of ``K`` by at most ``m`` translates, or None.

    Cones get the eight-translate cone cover, three-dimensional ``l_p`` balls
    the six- or eight-translate ball cover (the octahedron at ratio 2/3) and
    the cube its octants.  Used to
    seed searches; the caller still verifies.
    """
    from ..bodies import Cone, LpBall

    cfg = None
    if isinstance(K, Cone):
        cfg = cone_cover_thm1(K).with_ratio(2.0 / 3.0 + 1e-6)
    elif isinstance(K, LpBall) and K.dim == 3:
        if math.isinf(K.p):
            cfg = cube_octant_config().with_ratio(0.5 + 1e-6)
        elif K.p == 1:
            # the six axis translates already cover the octahedron at 2/3
            cfg = lpball_cover_thm2(1).with_ratio(2.0 / 3.0 + 1e-6)
        else:
            cfg = lpball_cover_thm2(K.p)
            cfg = cfg.with_ratio(cfg.r + 1e-4)
    if cfg is None or cfg.m > m:
        return None
    return cfg
