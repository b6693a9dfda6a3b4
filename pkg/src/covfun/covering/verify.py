"""Sound three-valued verification of coverings by homothets.

A configuration ``(r, x_1..x_m)`` describes the translates
``x_i + ref + r (K - ref)``; a point ``p`` lies in translate ``i`` iff
``gauge(p - x_i) <= r``.  Verification decomposes ``K`` into simplices and
refines them until every simplex has all of its vertices inside one common
translate with gauge at most ``r - margin`` (by convexity the whole simplex is
then covered) or a point of ``K`` with gauge at least ``r + margin`` to every
translate turns up.

Polytopes are split along the facet planes of the translates, shrunk to
ratio ``r - 1.5 margin``, which resolves tight coverings in a bounded number
of cuts; longest-edge bisection is the fallback.  Other bodies are covered
by a cone fan over an adaptive triangulation of directions: each cone piece
of ``K`` sits inside an explicit outer simplex whose apex is the reference
point, and direction cells are refined until the outer simplices verify.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

TAU_COV = 1e-7
DELTA_MAX = 1e-3
DEFAULT_MAX_DEPTH = 40
MAX_CELLS = 10 ** 8

COVERED = "covered"
UNCOVERED = "uncovered"
UNKNOWN = "unknown"

_EXIT_CODES = {COVERED: 0, UNCOVERED: 1, UNKNOWN: 2}


@dataclass
class CoverConfig:
    """Ratio ``r`` and translation vectors relative to the homothety anchor."""

    r: float
    centers: np.ndarray

    def __post_init__(self):
        self.r = float(self.r)
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if not 0 < self.r <= 1:
            raise ValueError("covering ratio must lie in (0, 1]")
        if len(self.centers) < 1:
            raise ValueError("a covering needs at least one translate")

    @property
    def m(self):
        return len(self.centers)

    def with_ratio(self, r):
        return CoverConfig(r, self.centers.copy())

    def scaled(self, factor):
        """Ratio and centers multiplied by ``factor`` (the continuity transfer)."""
        if self.r * factor > 1.0:
            raise ValueError("scaled ratio exceeds 1; the transfer says nothing there")
        return CoverConfig(self.r * factor, self.centers * factor)

    def transformed(self, matrix):
        """Config for ``A(K)``: only the linear part of ``A`` acts on the centers."""
        return CoverConfig(self.r, self.centers @ np.asarray(matrix, dtype=float).T)

    def to_json(self):
        return {"r": self.r, "centers": self.centers.tolist()}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "r" not in obj or "centers" not in obj:
            raise ValueError("config JSON needs 'r' and 'centers'")
        return cls(obj["r"], obj["centers"])


@dataclass
class CoverCertificate:
    verdict: str
    witness: np.ndarray = None
    cells_examined: int = 0
    max_depth: int = 0
    margin: float = TAU_COV
    details: dict = field(default_factory=dict)

    @property
    def covered(self):
        return self.verdict == COVERED

    @property
    def exit_code(self):
        return _EXIT_CODES[self.verdict]

    def to_json(self):
        out = {"verdict": self.verdict,
               "witness": None if self.witness is None else self.witness.tolist(),
               "cells_examined": self.cells_examined, "max_depth": self.max_depth,
               "margin": self.margin}
        out.update(self.details)
        return out


def trivial_certificate(K):
    """``K`` covers itself; the one case verified by identity instead of subdivision."""
    return CoverCertificate(COVERED, None, 0, 0, 0.0, {"method": "identity"})


class _Budget:
    def __init__(self, max_cells, time_limit):
        self.cells = 0
        self.max_cells = max_cells
        self.deadline = None if time_limit is None else time.monotonic() + time_limit
        self.depth = 0

    def spent(self):
        if self.cells >= self.max_cells:
            return True
        return self.deadline is not None and (self.cells & 255) == 0 and time.monotonic() > self.deadline


def verify_cover(K, cfg, max_depth=DEFAULT_MAX_DEPTH, margin=TAU_COV, max_cells=MAX_CELLS,
                 time_limit=None, max_inflation=DELTA_MAX):
    """Certify ``K subset union_i (x_i + ref + r (K - ref))``.

    Returns a :class:`CoverCertificate`.  ``covered`` is sound in exact
    arithmetic up to the ``margin`` band; ``uncovered`` carries a witness in
    ``K`` whose gauge to every translate is at least ``r + margin``;
    ``unknown`` means the depth or cell budget ran out.  For non-polytopes
    every fan cell is refined until its outer simplex inflates the inner fan
    piece by at most ``max_inflation``, so ``K subset (1 + delta) P`` for the
    fan polytope ``P``; the achieved ``delta`` is reported as ``inflation``.
    """
    if cfg.centers.shape[1] != K.dim:
        raise ValueError("center dimension does not match the body")
    if margin < 0 or cfg.r - 1.5 * margin <= 0:
        raise ValueError("margin too large for the covering ratio")
    if not np.all(np.isfinite(cfg.centers)):
        raise ValueError("centers must be finite")
    if cfg.r >= 1.0 and np.any(np.abs(cfg.centers).max(axis=1) == 0.0):
        # one translate is K itself
        return trivial_certificate(K)
    budget = _Budget(max_cells, time_limit)
    if K.is_polytope:
        verdict, witness, extra = _verify_polytope(K, cfg, max_depth, margin, budget)
    else:
        verdict, witness, extra = _verify_smooth(K, cfg, max_depth, margin, budget, max_inflation)
    if witness is not None:
        witness = witness + K.reference_point
    return CoverCertificate(verdict, witness, budget.cells, budget.depth, margin, extra)


# ---------------------------------------------------------------------------
# polytopes: facet-plane cuts with bisection fallback
# ---------------------------------------------------------------------------

_SEP_EPS = 1e-12
_MAX_CUTS = 400


def _longest_edge(S):
    best, pair = -1.0, (0, 1)
    k = len(S)
    for a in range(k):
        for b in range(a + 1, k):
            L = float(np.dot(S[a] - S[b], S[a] - S[b]))
            if L > best:
                best, pair = L, (a, b)
    return pair


def _split(S, a, b, w):
    left = S.copy()
    left[a] = w
    right = S.copy()
    right[b] = w
    return left, right


def _fan_simplices(P):
    ref = P.reference_point
    V0 = P.vertices - ref
    origin = np.zeros((1, P.dim))
    return [np.vstack([origin, V0[s]]) for s in P.simplices]


def _verify_polytope(K, cfg, max_depth, margin, budget):
    P = K.as_polytope()
    A, b = P.halfspaces0()
    X = cfg.centers
    XA = X @ A.T
    r = cfg.r
    r_ok, r_bad, r_cut = r - margin, r + margin, r - 1.5 * margin
    stack = [(S, 0, 0) for S in reversed(_fan_simplices(P))]
    unknown = False
    cuts = 0
    while stack:
        S, depth, ncut = stack.pop()
        budget.cells += 1
        budget.depth = max(budget.depth, depth)
        vals = ((S @ A.T)[None, :, :] - XA[:, None, :]) / b
        G = vals.max(axis=2)
        worst = G.max(axis=1)
        if worst.min() <= r_ok:
            continue
        vmin = G.min(axis=0)
        k = int(np.argmax(vmin))
        if vmin[k] >= r_bad and P._gauge0(S[k:k + 1])[0] <= 1 + 1e-12:
            return UNCOVERED, S[k], {"method": "facet-cuts", "cuts": cuts}
        if budget.spent():
            return UNKNOWN, None, {"method": "facet-cuts", "cuts": cuts, "reason": "budget"}
        split = None
        if ncut < _MAX_CUTS:
            for i in np.argsort(worst, kind="stable"):
                s = vals[i] - r_cut
                smax, smin = s.max(axis=0), s.min(axis=0)
                sep = (smax > _SEP_EPS) & (smin < -_SEP_EPS)
                if not sep.any():
                    continue
                j = int(np.argmax(np.where(sep, smax, -np.inf)))
                col = s[:, j]
                pos = np.flatnonzero(col > _SEP_EPS)
                neg = np.flatnonzero(col < -_SEP_EPS)
                pa, pb, best = 0, 0, -1.0
                for a in pos:
                    for c in neg:
                        L = float(np.dot(S[a] - S[c], S[a] - S[c]))
                        if L > best:
                            pa, pb, best = a, c, L
                t = col[pa] / (col[pa] - col[pb])
                w = S[pa] + t * (S[pb] - S[pa])
                split = _split(S, pa, pb, w)
                cuts += 1
                stack.append((split[1], depth, ncut + 1))
                stack.append((split[0], depth, ncut + 1))
                break
        if split is not None:
            continue
        centroid = S.mean(axis=0)
        cg = (((centroid @ A.T)[None, :] - XA) / b).max(axis=1).min()
        if cg >= r_bad:
            return UNCOVERED, centroid, {"method": "facet-cuts", "cuts": cuts}
        if depth >= max_depth:
            unknown = True
            continue
        a, c = _longest_edge(S)
        left, right = _split(S, a, c, 0.5 * (S[a] + S[c]))
        stack.append((right, depth + 1, ncut))
        stack.append((left, depth + 1, ncut))
    extra = {"method": "facet-cuts", "cuts": cuts}
    return (UNKNOWN if unknown else COVERED), None, extra


# ---------------------------------------------------------------------------
# smooth bodies: adaptive outer fan
# ---------------------------------------------------------------------------

_FAN_LEVEL0 = {2: 32, 3: 2}
_FAN_MAX_LEVEL = {2: 24, 3: 12}
_FAN_CELL_BUDGET = 4000


def _initial_direction_cells(dim):
    if dim == 2:
        n = _FAN_LEVEL0[2]
        ang = 2 * math.pi * np.arange(n + 1) / n
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        return [np.vstack([pts[i], pts[i + 1]]) for i in range(n)]
    E = np.eye(3)
    cells = []
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                tri = np.array([sx * E[0], sy * E[1], sz * E[2]])
                if sx * sy * sz < 0:
                    tri = tri[[0, 2, 1]]
                cells.append(tri)
    for _ in range(_FAN_LEVEL0[3]):
        cells = [c for tri in cells for c in _split_direction_cell(tri)]
    return cells


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _split_direction_cell(U):
    if len(U) == 2:
        mid = _normalize(U[0] + U[1])
        return [np.vstack([U[0], mid]), np.vstack([mid, U[1]])]
    a, b, c = U
    ab, bc, ca = _normalize(a + b), _normalize(b + c), _normalize(c + a)
    return [np.array([a, ab, ca]), np.array([ab, b, bc]), np.array([ca, bc, c]),
            np.array([ab, bc, ca])]


def outer_fan_simplex(K, U):
    """Simplex ``conv(0, t B)`` containing the piece of ``K - ref`` in the cone over ``U``.

    ``B`` are the boundary points of ``K - ref`` along ``U`` and ``t`` is the
    support of ``K - ref`` in the normal of the facet through ``B``.
    """
    B = U / K._gauge0(U)[:, None]
    normal = np.linalg.solve(B, np.ones(len(B)))
    t = max(float(K._support(normal[None, :])[0] - normal @ K.reference_point), 1.0)
    return np.vstack([np.zeros((1, K.dim)), t * B]), t


def _verify_smooth(K, cfg, max_depth, margin, budget, max_inflation):
    X = cfg.centers
    r = cfg.r
    r_ok, r_bad = r - margin, r + margin
    dim = K.dim
    cells = [(U, 0) for U in reversed(_initial_direction_cells(dim))]
    unknown = False
    inflation = 0.0
    fan_cells = 0
    max_level = 0

    def gauges(S):
        diffs = (S[None, :, :] - X[:, None, :]).reshape(-1, dim)
        return K._gauge0(diffs).reshape(len(X), len(S))

    while cells:
        U, level = cells.pop()
        fan_cells += 1
        max_level = max(max_level, level)
        S0, t = outer_fan_simplex(K, U)
        if t - 1.0 > max_inflation and level < _FAN_MAX_LEVEL[dim]:
            cells.extend((child, level + 1) for child in reversed(_split_direction_cell(U)))
            continue
        status, witness = _bisect_outer(K, S0, gauges, r_ok, r_bad, max_depth, budget,
                                        abort_outside=level < _FAN_MAX_LEVEL[dim])
        if status == COVERED:
            inflation = max(inflation, t - 1.0)
            continue
        extra = {"method": "outer-fan", "fan_cells": fan_cells, "fan_level": max_level}
        if status == UNCOVERED:
            return UNCOVERED, witness, extra
        if budget.spent():
            extra["reason"] = "budget"
            return UNKNOWN, None, extra
        if level < _FAN_MAX_LEVEL[dim]:
            for child in reversed(_split_direction_cell(U)):
                cells.append((child, level + 1))
        else:
            unknown = True
    extra = {"method": "outer-fan", "fan_cells": fan_cells, "fan_level": max_level,
             "inflation": inflation}
    return (UNKNOWN if unknown else COVERED), None, extra


def _bisect_outer(K, S0, gauges, r_ok, r_bad, max_depth, budget, abort_outside):
    """Verify one outer simplex; ``refine`` asks the caller for a finer direction cell."""
    stack = [(S0, 0)]
    local = 0
    while stack:
        S, depth = stack.pop()
        budget.cells += 1
        local += 1
        budget.depth = max(budget.depth, depth)
        G = gauges(S)
        if G.max(axis=1).min() <= r_ok:
            continue
        vmin = G.min(axis=0)
        own = K._gauge0(S)
        bad = (vmin >= r_bad) & (own <= 1.0)
        if bad.any():
            return UNCOVERED, S[int(np.argmax(bad))]
        if abort_outside and np.any((own > 1.0) & (vmin > r_ok)):
            return "refine", None
        if abort_outside and local > _FAN_CELL_BUDGET:
            return "refine", None
        if budget.spent() or depth >= max_depth:
            return UNKNOWN, None
        a, c = _longest_edge(S)
        left, right = _split(S, a, c, 0.5 * (S[a] + S[c]))
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    return COVERED, None
