"""Diameter partitions of point clouds and constant-width bodies.

``phi_m`` of a finite set is the least ratio ``r`` such that the set splits
into ``m`` parts of diameter at most ``r d(X)``.  A split at threshold ``t``
exists iff the conflict graph (pairs farther apart than ``t``) is
``m``-colourable, so the search runs over the sorted pairwise distances.
"""

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .bodies import ReuleauxPolygon
from .budget import SearchBudget
from .directions import default_grid_size, direction_grid
from .geometry import euclidean_radii, widths

EXACT_LIMIT = 25
NODE_LIMIT = 20_000
RESTARTS = 1000
WIDTH_TOL = 1e-4
RADII_SLACK = 1e-6


@dataclass
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if len(self.points) < 2:
            raise ValueError("a point cloud needs at least two points")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("points must be finite")

    @property
    def dim(self):
        return self.points.shape[1]

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "points" not in obj:
            raise ValueError("point cloud JSON needs 'points'")
        return cls(obj["points"])


@dataclass
class PartitionResult:
    assignment: np.ndarray
    r_ratio: float
    exact: bool
    threshold: float = 0.0
    diameter: float = 0.0

    def to_json(self):
        return {"assignment": (self.assignment + 1).tolist(), "r_ratio": self.r_ratio,
                "exact": self.exact, "estimate": "sampled"}


# ---------------------------------------------------------------------------
# colouring
# ---------------------------------------------------------------------------

class _TooHard(Exception):
    pass


def _exact_coloring(adj, m, node_limit=None):
    """Backtracking in DSATUR order; returns a colour array or None.

    With ``node_limit`` the search raises :class:`_TooHard` after that many
    branching steps.
    """
    n = len(adj)
    colors = np.full(n, -1)
    nbrs = [np.flatnonzero(adj[v]) for v in range(n)]
    nodes = [0]

    def pick():
        best, key = -1, None
        for v in range(n):
            if colors[v] >= 0:
                continue
            sat = len({int(c) for c in colors[nbrs[v]] if c >= 0})
            k = (sat, len(nbrs[v]))
            if key is None or k > key:
                best, key = v, k
        return best

    def solve(done, used):
        if done == n:
            return True
        nodes[0] += 1
        if node_limit is not None and nodes[0] > node_limit:
            raise _TooHard
        v = pick()
        taken = {int(c) for c in colors[nbrs[v]] if c >= 0}
        # symmetry breaking: at most one brand-new colour per step
        for c in range(min(used + 1, m)):
            if c in taken:
                continue
            colors[v] = c
            if solve(done + 1, max(used, c + 1)):
                return True
        colors[v] = -1
        return False

    return colors.copy() if solve(0, 0) else None


def _greedy_dsatur(adj, m, rng):
    n = len(adj)
    colors = np.full(n, -1)
    sat = np.zeros((n, m), dtype=bool)
    # saturation dominates, then degree, then random tie-breaks
    base = adj.sum(axis=1) + rng.random(n)
    for _ in range(n):
        key = sat.sum(axis=1) * (n + 1.0) + base
        key[colors >= 0] = -np.inf
        v = int(np.argmax(key))
        options = np.flatnonzero(~sat[v])
        if len(options) == 0:
            return None
        c = options[0] if rng.random() < 0.8 else options[int(rng.integers(len(options)))]
        colors[v] = c
        sat[adj[v], c] = True
    return colors


def _find_clique(adj, size, tries=64):
    """Greedy search for a clique of ``size`` vertices (a proof of non-colourability)."""
    deg = adj.sum(axis=1)
    for v in np.argsort(-deg, kind="stable")[:tries]:
        clique = [int(v)]
        cand = adj[v].copy()
        while cand.any() and len(clique) < size:
            inner = (adj[cand][:, cand]).sum(axis=1)
            w = int(np.flatnonzero(cand)[np.argmax(inner)])
            clique.append(w)
            cand &= adj[w]
        if len(clique) >= size:
            return clique
    return None


def _reduce(adj, m):
    """Peel vertices that never constrain an ``m``-colouring.

    A vertex of degree below ``m`` always finds a free colour, and a vertex
    whose neighbourhood lies inside that of a non-adjacent vertex can copy
    its colour.  Returns the kept vertex indices and the removal log.
    """
    alive = np.ones(len(adj), dtype=bool)
    log = []
    changed = True
    while changed:
        changed = False
        deg = (adj & alive).sum(axis=1)
        low = np.flatnonzero(alive & (deg < m))
        for v in low:
            alive[v] = False
            log.append((int(v), -1))
            changed = True
        if changed:
            continue
        idx = np.flatnonzero(alive)
        sub = adj[np.ix_(idx, idx)]
        # inter[u, v] = |N(u) & N(v)|; u dominated by v iff inter = deg(u), u !~ v
        inter = sub.astype(np.int32) @ sub.astype(np.int32).T
        dg = sub.sum(axis=1)
        dom = (inter == dg[:, None]) & ~sub
        np.fill_diagonal(dom, False)
        # equal neighbourhoods: keep the lower index
        twins = dom & dom.T
        dom &= ~twins | (np.arange(len(idx))[:, None] > np.arange(len(idx))[None, :])
        rows = np.flatnonzero(dom.any(axis=1))
        if len(rows):
            u = rows[0]
            v = int(np.flatnonzero(dom[u])[0])
            alive[idx[u]] = False
            log.append((int(idx[u]), int(idx[v])))
            changed = True
    return np.flatnonzero(alive), log


def _extend(adj, colors, log, m):
    for v, w in reversed(log):
        if w >= 0:
            colors[v] = colors[w]
        else:
            taken = set(colors[adj[v] & (colors >= 0)].tolist())
            colors[v] = next(c for c in range(m) if c not in taken)
    return colors


def _color_graph(adj, m, rng, restarts=RESTARTS, deadline=None):
    """``(answer, colors, exact)`` for ``m``-colourability of ``adj``.

    ``answer`` is None when the heuristic gives up on a large graph.
    """
    n = len(adj)
    if not adj.any():
        return True, np.zeros(n, dtype=int), True
    if m == 1:
        return False, None, True
    active, log = _reduce(adj, m)
    colors = np.full(n, -1)
    if len(active) == 0:
        return True, _extend(adj, colors, log, m), True
    sub = adj[np.ix_(active, active)]
    if len(active) <= EXACT_LIMIT:
        got = _exact_coloring(sub, m)
        if got is None:
            return False, None, True
        colors[active] = got
        return True, _extend(adj, colors, log, m), True
    if _find_clique(sub, m + 1) is not None:
        return False, None, True
    try:
        got = _exact_coloring(sub, m, node_limit=NODE_LIMIT)
    except _TooHard:
        pass
    else:
        if got is None:
            return False, None, True
        colors[active] = got
        return True, _extend(adj, colors, log, m), True
    for _ in range(restarts):
        got = _greedy_dsatur(sub, m, rng)
        if got is not None:
            colors[active] = got
            return True, _extend(adj, colors, log, m), False
        if deadline is not None and time.monotonic() > deadline:
            break
    return None, None, False


def conflict_colorable(X, r, m, seed=0):
    """Can the cloud be split into ``m`` parts of diameter at most ``r d(X)``?

    Returns ``(answer, coloring)``.  After peeling vertices that cannot
    matter, cores of at most ``EXACT_LIMIT`` vertices are decided exactly;
    larger cores get a bounded exact search, then a greedy search that either
    finds a colouring (True) or returns None (unknown), never a false False.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if m < 1:
        raise ValueError("m must be >= 1")
    X = X if isinstance(X, PointCloud) else PointCloud(X)
    D = squareform(pdist(X.points))
    adj = D > r * D.max()
    answer, colors, _ = _color_graph(adj, m, np.random.default_rng(seed))
    return answer, colors


def _distance_levels(D, rtol=1e-12):
    """Distinct pairwise distances; values equal up to ``rtol`` collapse to the largest."""
    v = np.sort(D[np.triu_indices(len(D), 1)])
    keep = np.r_[v[1:] > v[:-1] * (1 + rtol), True]
    return v[keep]


def phi_upper(X, m, budget=None, upper=None):
    """Upper bound on ``phi_m`` of a point cloud by bisection over pairwise distances.

    ``upper`` (a previous :class:`PartitionResult`, e.g. for ``m - 1``)
    seeds the bracket, so results are monotone along a chain of ``m``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    X = X if isinstance(X, PointCloud) else PointCloud(X)
    budget = budget or SearchBudget()
    rng = np.random.default_rng(budget.seed)
    deadline = budget.deadline()
    D = squareform(pdist(X.points))
    d = float(D.max())
    levels = np.concatenate([[0.0], _distance_levels(D)])
    exact = True

    def feasible(k):
        nonlocal exact
        answer, colors, ex = _color_graph(D > levels[k], m, rng, deadline=deadline)
        exact &= ex or answer is True
        return colors if answer else None

    hi = len(levels) - 1
    best = np.zeros(len(D), dtype=int)
    if upper is not None and upper.threshold < levels[hi]:
        hi = int(np.searchsorted(levels, upper.threshold))
        best = upper.assignment.copy()
    lo = -1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        got = feasible(mid)
        if got is not None:
            hi, best = mid, got
        else:
            lo = mid
    return PartitionResult(best, levels[hi] / d, exact, float(levels[hi]), d)


def part_diameters(X, assignment):
    P = X.points if isinstance(X, PointCloud) else np.asarray(X, dtype=float)
    out = []
    for c in np.unique(assignment):
        Q = P[assignment == c]
        out.append(float(pdist(Q).max()) if len(Q) > 1 else 0.0)
    return out


# ---------------------------------------------------------------------------
# constant width
# ---------------------------------------------------------------------------

def reuleaux_polygon(k):
    """Width-1 Reuleaux polygon over the regular ``k``-gon (odd ``3 <= k <= 21``)."""
    if k % 2 == 0 or not 3 <= k <= 21:
        raise ValueError("k must be odd with 3 <= k <= 21")
    return ReuleauxPolygon(k)


def mu_n(n):
    """``(sqrt(2n^2 + 2n) + n) / (n + 2)``."""
    return (math.sqrt(2 * n * n + 2 * n) + n) / (n + 2)


def constant_width_radii_check(K, n=None, grid=None):
    """Check ``1 - sqrt(n/(2n+2)) <= r <= R <= sqrt(n/(2n+2))`` for a width-1 body.

    Returns ``(ok, r, R, mu_n)``.
    """
    n = n or K.dim
    dirs = direction_grid(K.dim, grid or default_grid_size(K.dim))
    w = widths(K, dirs)
    if np.abs(w - 1.0).max() > WIDTH_TOL:
        raise ValueError(f"body is not of constant width 1 (widths in [{w.min():.6g}, {w.max():.6g}])")
    r, _, R, _ = euclidean_radii(K, grid)
    bound = math.sqrt(n / (2 * n + 2))
    ok = (r >= 1 - bound - RADII_SLACK) and (r <= R + RADII_SLACK) and (R <= bound + RADII_SLACK)
    return ok, r, R, mu_n(n)


def hausdorff_distance(K1, K2, grid=None):
    """``max_u |h_K1(u) - h_K2(u)|`` over a unit direction grid."""
    if K1.dim != K2.dim:
        raise ValueError("bodies must have the same dimension")
    dirs = direction_grid(K1.dim, grid or default_grid_size(K1.dim))
    return float(np.abs(K1.support(dirs) - K2.support(dirs)).max())
