"""Metric quantities of convex bodies: volume, diameter, in- and circumradius."""

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import pdist

from .bodies import LpBall, ReuleauxPolygon, chebyshev_center
from .directions import default_grid_size, direction_grid


def volume(K):
    """Volume (area in the plane).

    Polytopes use qhull's triangulation, l_p balls the closed form
    ``2^n Gamma(1+1/p)^n / Gamma(1+n/p)``, cones base area times height over 3.
    """
    return K.volume()


def widths(K, dirs):
    return K.support(dirs) + K.support(-dirs)


def diameter(K, grid=None):
    """Euclidean diameter.

    Exact for polytopes (vertex pairs), l_p balls and Reuleaux polygons;
    for other bodies the maximum width over a direction grid of ``grid``
    samples (default 2**14 in the plane, 10**5 in space).
    """
    if K.is_polytope:
        return float(pdist(K.as_polytope().vertices).max())
    if isinstance(K, LpBall):
        p, n = K.p, K.dim
        return 2.0 if p <= 2 else 2.0 * n ** (0.5 - 1.0 / p)
    if isinstance(K, ReuleauxPolygon):
        return 1.0
    dirs = direction_grid(K.dim, grid or default_grid_size(K.dim))
    return float(widths(K, dirs).max())


def _inradius_lp(dirs, h):
    """max r s.t. the ball (c, r) lies below every support constraint u.x <= h(u)."""
    d = dirs.shape[1]
    norms = np.linalg.norm(dirs, axis=1)
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_ub=np.hstack([dirs, norms[:, None]]), b_ub=h,
                  bounds=[(None, None)] * d + [(0, None)], method="highs")
    return res.x[:d], float(res.x[-1])


def _circumradius_lp(dirs, h):
    """min R s.t. h(u) - u.c <= R for unit u (support-function form of the enclosing ball)."""
    d = dirs.shape[1]
    cost = np.zeros(d + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=np.hstack([-dirs, -np.ones((len(dirs), 1))]), b_ub=-h,
                  bounds=[(None, None)] * (d + 1), method="highs")
    return res.x[:d], float(res.x[-1])


def euclidean_radii(K, grid=None):
    """Return ``(r, in_center, R, circ_center)``.

    ``r`` is the radius of the largest inscribed ball and ``R`` the radius of
    the smallest enclosing ball.  For polytopes ``r`` is exact (Chebyshev LP)
    and ``R`` is the exact enclosing radius about the LP centre.  Smooth
    bodies are measured on a direction grid.
    """
    dirs = direction_grid(K.dim, grid or default_grid_size(K.dim))
    if K.is_polytope:
        P = K.as_polytope()
        c_in, r = chebyshev_center(P.normals, P.offsets)
        c_out, _ = _circumradius_lp(dirs, P.support(dirs))
        c_out = _refine_circumcenter(P.vertices, c_out)
        R = float(np.linalg.norm(P.vertices - c_out, axis=1).max())
        return float(r), c_in, R, c_out
    h = K.support(dirs)
    c_in, r = _inradius_lp(dirs, h)
    c_out, R = _circumradius_lp(dirs, h)
    R = float((h - dirs @ c_out).max())
    return r, c_in, R, c_out


def _refine_circumcenter(points, c, iters=2000):
    """Badoiu-Clarkson style polishing of the enclosing-ball centre of a point set."""
    best = c.copy()
    best_r = np.linalg.norm(points - best, axis=1).max()
    x = c.copy()
    for k in range(1, iters + 1):
        far = points[np.argmax(np.linalg.norm(points - x, axis=1))]
        x = x + (far - x) / (k + 1)
        rr = np.linalg.norm(points - x, axis=1).max()
        if rr < best_r:
            best, best_r = x.copy(), rr
    return best
