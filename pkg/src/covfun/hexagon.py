"""Inscribed affine regular hexagons of planar convex bodies.

An affine regular hexagon with centre ``c`` has vertices ``c + a, c + b,
c + b - a, c - a, c - b, c - b + a``.  Its long diagonal ``[c - a, c + a]``
is a chord of length ``2 l`` and the edges ``[c + b - a, c + b]`` and
``[c - b, c - b + a]`` are parallel chords of length ``l`` at equal
distances on either side.  For a chord direction ``u`` we pick the two
equal-length chords so that the chord half way between them is twice as
long; the remaining condition (its midpoint is the average of the other two
midpoints) changes sign when ``u`` is reversed, so bisection over the
direction angle finds a root.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .bodies import LpBall, ReuleauxPolygon

_XTOL = 1e-14


class HexagonError(RuntimeError):
    pass


@dataclass
class AffineHexagon:
    center: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def vertices(self):
        c, a, b = self.center, self.a, self.b
        rel = np.array([a, b, b - a, -a, -b, a - b])
        return c + rel

    @property
    def edge_midpoints(self):
        v = self.vertices
        return 0.5 * (v + np.roll(v, -1, axis=0))

    def residuals(self, D):
        """Largest ``|gauge - 1|`` over the vertices and the symmetry defect."""
        v = self.vertices
        boundary = float(np.abs(D.gauge(v) - 1.0).max())
        sym = float(np.abs((v[3:] - self.center) + (v[:3] - self.center)).max())
        return boundary, sym


def _chord_interval(D, p0, u):
    """Parameter interval ``[s0, s1]`` of ``{p0 + s u} cap D`` (or None)."""
    if D.is_polytope:
        P = D.as_polytope()
        num = P.offsets - P.normals @ p0
        den = P.normals @ u
        lo, hi = -np.inf, np.inf
        par = np.abs(den) < 1e-12
        if np.any(num[par] < -1e-12):
            return None
        pos, neg = den >= 1e-12, den <= -1e-12
        if pos.any():
            hi = float((num[pos] / den[pos]).min())
        if neg.any():
            lo = float((num[neg] / den[neg]).max())
        return (lo, hi) if lo <= hi else None
    if isinstance(D, LpBall) and D.p == 2:
        return _disc_interval(p0, u, np.zeros(2), 1.0)
    if isinstance(D, ReuleauxPolygon):
        lo, hi = -np.inf, np.inf
        for c, rad in zip(D.arc_centers, D.arc_radii):
            iv = _disc_interval(p0, u, c, rad)
            if iv is None:
                return None
            lo, hi = max(lo, iv[0]), min(hi, iv[1])
        return (lo, hi) if lo <= hi else None
    return _generic_interval(D, p0, u)


def _disc_interval(p0, u, c, rad):
    w = p0 - c
    bq = float(w @ u)
    disc = bq * bq - float(w @ w) + rad * rad
    if disc < 0:
        return None
    s = math.sqrt(disc)
    return -bq - s, -bq + s


def _generic_interval(D, p0, u):
    g = lambda s: float(D.gauge(p0 + s * u))
    span = 2.0 * float(np.linalg.norm(D.boundary_points(np.array([u, -u])), axis=1).max()) + \
        float(np.linalg.norm(p0 - D.reference_point))
    res = minimize_scalar(g, bounds=(-span, span), method="bounded", options={"xatol": 1e-12})
    s_in = float(res.x)
    if g(s_in) > 1:
        return None
    hi = brentq(lambda s: g(s) - 1, s_in, s_in + span, xtol=_XTOL) if g(s_in + span) > 1 else s_in
    lo = brentq(lambda s: g(s) - 1, s_in - span, s_in, xtol=_XTOL) if g(s_in - span) > 1 else s_in
    return lo, hi


class _Slicer:
    """Chords of ``D`` perpendicular to ``n``, indexed by the offset ``t = n . x``."""

    def __init__(self, D, phi):
        self.D = D
        self.u = np.array([math.cos(phi), math.sin(phi)])
        self.n = np.array([-self.u[1], self.u[0]])
        h = D.support(np.array([self.n, -self.n]))
        self.t_max, self.t_min = float(h[0]), -float(h[1])

    def chord(self, t):
        p0 = t * self.n
        iv = _chord_interval(self.D, p0, self.u)
        if iv is None:
            return p0, p0
        return p0 + iv[0] * self.u, p0 + iv[1] * self.u

    def length(self, t):
        if t <= self.t_min or t >= self.t_max:
            return 0.0
        p, q = self.chord(t)
        return float(np.linalg.norm(q - p))

    def widest(self):
        span = self.t_max - self.t_min
        res = minimize_scalar(lambda t: -self.length(t),
                              bounds=(self.t_min + 1e-9 * span, self.t_max - 1e-9 * span),
                              method="bounded", options={"xatol": 1e-12 * max(span, 1)})
        return float(res.x), self.length(float(res.x))

    def offset_with_length(self, ell, t_star, upper):
        end = self.t_max if upper else self.t_min
        f = lambda t: self.length(t) - ell
        if f(end) >= 0:
            return end
        if f(t_star) <= 0:
            return t_star
        return brentq(f, t_star, end, xtol=_XTOL)


def _hexagon_for_direction(D, phi):
    """Hexagon candidate for chord direction ``phi`` and its midpoint residual."""
    sl = _Slicer(D, phi)
    t_star, W = sl.widest()

    def offsets(ell):
        return (sl.offset_with_length(ell, t_star, False),
                sl.offset_with_length(ell, t_star, True))

    def h(ell):
        tl, tu = offsets(ell)
        return sl.length(0.5 * (tl + tu)) - 2 * ell

    lo, hi = 1e-12 * W, W * (1 - 1e-12)
    if h(lo) <= 0 or h(hi) >= 0:
        raise HexagonError(f"length condition not bracketed at angle {phi:.6g}")
    ell = brentq(h, lo, hi, xtol=_XTOL * max(W, 1))
    tl, tu = offsets(ell)
    u = sl.u
    middle = sl.chord(0.5 * (tl + tu))
    s_m = float(0.5 * (middle[0] + middle[1]) @ u)
    # feasible midpoint ranges (along u) of length-ell sub-chords; a range is a
    # single point unless the chord lies on an edge parallel to u
    ranges = []
    for t in (tu, tl):
        p, q = sl.chord(t)
        s0, s1 = float(p @ u), float(q @ u)
        lo_s, hi_s = s0 + ell / 2, s1 - ell / 2
        if hi_s < lo_s:
            lo_s = hi_s = 0.5 * (s0 + s1)
        ranges.append((lo_s, hi_s))
    (au, bu), (al, bl) = ranges
    span = (bu - au) + (bl - al)
    lam = 0.5 if span <= 0 else min(max((2 * s_m - au - al) / span, 0.0), 1.0)
    s_u, s_l = au + lam * (bu - au), al + lam * (bl - al)
    residual = s_m - 0.5 * (s_u + s_l)
    upper = (tu * sl.n + (s_u - ell / 2) * u, tu * sl.n + (s_u + ell / 2) * u)
    lower = (tl * sl.n + (s_l - ell / 2) * u, tl * sl.n + (s_l + ell / 2) * u)
    return residual, (sl, ell, lower, upper, middle)


def _assemble(sl, ell, lower, upper, middle):
    c = 0.5 * (middle[0] + middle[1])
    a = 0.5 * (middle[1] - middle[0])
    b = upper[1] - c
    return AffineHexagon(c, a, b)


def _nearest_edge_angle(D, phi):
    v = D.as_polytope().vertices
    e = np.roll(v, -1, axis=0) - v
    ang = np.mod(np.arctan2(e[:, 1], e[:, 0]), math.pi)
    dist = np.abs(np.mod(ang - phi + math.pi / 2, math.pi) - math.pi / 2)
    return float(ang[np.argmin(dist)])


def inscribe_affine_hexagon(D, tol=1e-7):
    """Affine regular hexagon with all six vertices on the boundary of ``D``.

    Returns an :class:`AffineHexagon`; ``vertices`` lists them counter-clockwise
    and ``center`` is the symmetry centre.  Raises :class:`HexagonError` if the
    boundary residual exceeds ``tol``.
    """
    if D.dim != 2:
        raise ValueError("hexagon inscription needs a planar body")
    g0, data0 = _hexagon_for_direction(D, 0.0)
    if abs(g0) < 1e-13:
        hexagon = _assemble(*data0)
    else:
        g_pi, _ = _hexagon_for_direction(D, math.pi)
        if g0 * g_pi > 0:
            raise HexagonError(f"direction functional not bracketed: g(0)={g0:.3g}, g(pi)={g_pi:.3g}")
        lo, hi, glo = 0.0, math.pi, g0
        data = data0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            gm, data = _hexagon_for_direction(D, mid)
            if gm == 0 or hi - lo < 1e-15:
                break
            if (gm > 0) == (glo > 0):
                lo, glo = mid, gm
            else:
                hi = mid
        if abs(gm) > 1e-9 and D.is_polytope:
            # the root sits at a direction parallel to an edge, where chords on
            # that edge slide freely; evaluate exactly there
            phi = _nearest_edge_angle(D, 0.5 * (lo + hi))
            gm, data = _hexagon_for_direction(D, phi)
        hexagon = _assemble(*data)
    boundary, _ = hexagon.residuals(D)
    if boundary > tol:
        raise HexagonError(f"boundary residual {boundary:.3g} exceeds {tol:g}")
    return hexagon
