"""Upper bounds for the Banach-Mazur distance.

Both bodies are brought to John position first.  For a fixed linear map
``M`` the best sandwich ``K1 subset s M K2 + x subset rho K1 + x'`` over
``(s, x, rho, x')`` is a linear program in support-function form; the outer
search over ``M`` is Nelder-Mead from seeded rotation/scaling starts.  The
winning map is re-verified with exact facet/vertex tests where a polytope is
involved and on a direction grid otherwise, and ``rho`` is enlarged if the
check demands it, so the returned value is always a certified upper bound.
"""

import math
import time

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial.transform import Rotation

from .bodies import AffineImage, Polytope
from .budget import SearchBudget
from .directions import direction_grid
from .john import AffineCert, john_normalize

_SEARCH_DIRS = {2: 180, 3: 400}
_VERIFY_DIRS = 10_000


class _OutOfTime(Exception):
    pass


def _image(K, M, shift):
    if K.is_polytope:
        P = K.as_polytope()
        return Polytope(P.vertices @ M.T + shift, M @ P.reference_point + shift)
    return AffineImage(M, shift, K)


def _sandwich_lp(h1, hL, U):
    """min rho with h1 <= s hL + U x and s hL + U x <= rho h1 + U y.

    Variables ``(s, x, rho, y)``; returns ``(rho, s, x, y)`` or None.
    """
    N, d = U.shape
    z = np.zeros((N, 1))
    zd = np.zeros((N, d))
    A1 = np.hstack([-hL[:, None], -U, z, zd])
    A2 = np.hstack([hL[:, None], U, -h1[:, None], -U])
    cost = np.zeros(2 * d + 2)
    cost[d + 1] = 1.0
    bounds = [(1e-9, None)] + [(None, None)] * d + [(1.0, None)] + [(None, None)] * d
    res = linprog(cost, A_ub=np.vstack([A1, A2]), b_ub=np.concatenate([-h1, np.zeros(N)]),
                  bounds=bounds, method="highs")
    if res.status != 0:
        return None
    v = res.x
    return float(v[d + 1]), float(v[0]), v[1:d + 1], v[d + 2:]


def _search_dirs(K1n, K2n, M, grid):
    U = [grid]
    if K1n.is_polytope:
        U.append(K1n.normals)
    if K2n.is_polytope:
        n = K2n.normals @ np.linalg.inv(M)
        U.append(n / np.linalg.norm(n, axis=1, keepdims=True))
    return np.vstack(U)


def _objective(K1n, K2n, M, grid):
    U = _search_dirs(K1n, K2n, M, grid)
    h1 = K1n.support(U)
    hL = K2n.support(U @ M)
    sol = _sandwich_lp(h1, hL, U)
    return math.inf if sol is None else sol[0], sol


def _verify(K1n, K2n, M, s, x, grid):
    """Certified sandwich factor for ``L = s M K2n + x``; may shrink ``L`` about its centre."""
    L = _image(K2n, s * M, x)
    c = L.reference_point
    # inner containment K1n subset L, enlarging L about c when needed
    if L.is_polytope:
        P = L.as_polytope()
        g = float(((K1n.support(P.normals) - P.normals @ c) / (P.offsets - P.normals @ c)).max())
        inner_exact = True
    elif K1n.is_polytope:
        g = float(L.gauge(K1n.as_polytope().vertices).max())
        inner_exact = True
    else:
        hl = L.support(grid) - grid @ c
        g = float(((K1n.support(grid) - grid @ c) / hl).max())
        inner_exact = False
    if g > 1.0:
        s, x = s * g, c + g * (x - c)
        L = _image(K2n, s * M, x)
    # outer containment L subset rho K1n + y, K1n containing the origin
    if K1n.is_polytope:
        P = K1n.as_polytope()
        U = P.normals
        off = P.offsets
        outer_exact = True
    else:
        U = grid
        off = K1n.support(grid)
        outer_exact = False
    hL = L.support(U)
    res = linprog(np.r_[1.0, np.zeros(K1n.dim)],
                  A_ub=np.hstack([-off[:, None], -U]), b_ub=-hL,
                  bounds=[(1.0, None)] + [(None, None)] * K1n.dim, method="highs")
    rho, y = float(res.x[0]), res.x[1:]
    # tiny LP tolerance: close the gap exactly
    rho = max(rho, float(((hL - U @ y) / off).max()))
    return rho, s, x, y, inner_exact and outer_exact


def _starts(dim, count, rng):
    out = [np.eye(dim)]
    while len(out) < count:
        if dim == 2:
            a = rng.uniform(0, 2 * math.pi)
            R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        else:
            R = Rotation.random(random_state=rng).as_matrix()
        D = np.diag(np.exp(rng.uniform(-0.3, 0.3, dim)))
        out.append(R @ D)
    return out


def bm_distance_upper(K1, K2, budget=None, starts=32):
    """Certified upper bound ``log rho`` on the Banach-Mazur distance of ``K1`` and ``K2``.

    Returns ``(d, cert)``; ``cert`` maps ``K2`` onto the middle body of the
    sandwich ``K1 subset T(K2) subset rho K1 + y`` in the original coordinates.
    """
    if K1.dim != K2.dim:
        raise ValueError("bodies must have the same dimension")
    budget = budget or SearchBudget(max_time=30.0, starts=starts)
    dim = K1.dim
    rng = np.random.default_rng(budget.seed)
    c1, K1n = john_normalize(K1)
    c2, K2n = john_normalize(K2)
    grid = direction_grid(dim, _SEARCH_DIRS[dim])
    deadline = time.monotonic() + budget.max_time
    best = {"val": math.inf, "M": None}

    def f(z):
        M = z.reshape(dim, dim)
        if abs(np.linalg.det(M)) <= 1e-8:
            return math.inf
        val = _objective(K1n, K2n, M, grid)[0]
        if val < best["val"]:
            best["val"], best["M"] = val, M.copy()
        if time.monotonic() > deadline:
            raise _OutOfTime
        return val

    for M0 in _starts(dim, max(starts, 1), rng):
        if best["val"] <= 1 + 1e-12 or (best["M"] is not None and time.monotonic() > deadline):
            break
        try:
            minimize(f, M0.ravel(), method="Nelder-Mead",
                     options={"maxiter": budget.max_iterations, "xatol": 1e-7, "fatol": 1e-9})
        except _OutOfTime:
            break
    best_val, best_M = best["val"], best["M"]
    vgrid = direction_grid(dim, _VERIFY_DIRS)
    candidates = []
    if best_M is not None and math.isfinite(best_val):
        _, sol = _objective(K1n, K2n, best_M, grid)
        candidates.append((best_M, sol[1], sol[2]))
    # John position always gives K1n subset n K2n subset n^2 K1n
    candidates.append((np.eye(dim), float(dim), np.zeros(dim)))
    best = None
    for M, s, x in candidates:
        rho, s, x, y, exact = _verify(K1n, K2n, M, s, x, vgrid)
        if best is None or rho < best[0]:
            best = (rho, M, s, x, y, exact)
    rho, M, s, x, y, exact = best
    # map back: K1 = L1^{-1}(K1n - s1), K2n = L2 K2 + s2
    L1inv = np.linalg.inv(c1.matrix)
    T = L1inv @ (s * M) @ c2.matrix
    shift = L1inv @ (s * M @ c2.shift + x - c1.shift)
    cert = AffineCert(T, shift, True, True, len(vgrid),
                      {"rho": rho, "exact": exact,
                       "outer_shift": (L1inv @ (y - c1.shift * (1 - rho))).tolist()})
    return math.log(rho), cert
