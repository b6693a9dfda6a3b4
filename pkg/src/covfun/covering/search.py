"""Upper bounds for the covering functional by placement search plus verification.

The sampled objective ``max_p min_i gauge(p - x_i)`` is lowered by minimax
Lloyd iterations: every sample point goes to the translate with the
smallest gauge, then each translate is moved to the exact one-centre of its
cluster (a linear program for polytopes, SLSQP on the smooth gauge
otherwise).  A placement only counts once :func:`verify_cover` certifies
it; uncovered witnesses are added to the sample and the placement is
polished again.
"""

import itertools
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.special import logsumexp

from ..budget import SearchBudget
from ..directions import direction_grid
from ..hexagon import HexagonError, inscribe_affine_hexagon
from .verify import COVERED, UNCOVERED, CoverCertificate, CoverConfig, trivial_certificate, verify_cover

_DELTAS = (2e-4, 1e-3, 4e-3, 1.5e-2, 5e-2)
_RETRIES = 3


@dataclass
class SearchResult:
    r_upper: float
    config: CoverConfig
    certificate: CoverCertificate
    volume_floor: float
    starts_run: int = 0

    def to_json(self):
        return {"r_upper": self.r_upper, "config": self.config.to_json(),
                "certificate": self.certificate.to_json(), "volume_floor": self.volume_floor,
                "starts_run": self.starts_run}


def volume_lower_bound(K, m):
    """``m^(-1/n)``: ``m`` translates of ``rK`` have total volume ``m r^n vol(K)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return float(m ** (-1.0 / K.dim))


def _interior_lattice(K, count):
    """About ``count`` points of a cubic lattice inside ``K - ref``."""
    dim = K.dim
    h = K.support(np.vstack([np.eye(dim), -np.eye(dim)]))
    lo, hi = -h[dim:] - K.reference_point, h[:dim] - K.reference_point
    step = (K.volume() / count) ** (1.0 / dim)
    axes = [np.arange(a + 0.5 * step, b, step) for a, b in zip(lo, hi)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    return G[K._gauge0(G) <= 1.0]


def sample_body(K, n_boundary=None, layers=(0.75, 0.45), n_interior=None):
    """Deterministic points of ``K - ref``: boundary rays, shrunken shells, an interior lattice."""
    dim = K.dim
    n_boundary = n_boundary or (400 if dim == 2 else 1500)
    n_interior = n_interior if n_interior is not None else (600 if dim == 2 else 1500)
    pts = []
    if K.is_polytope:
        P = K.as_polytope()
        pts.append(P.vertices - P.reference_point)
    dirs = direction_grid(dim, n_boundary)
    bnd = dirs / K._gauge0(dirs)[:, None]
    pts.append(bnd)
    for lam in layers:
        sub = bnd[:: max(1, int(4 / lam))]
        pts.append(lam * sub)
    if n_interior:
        pts.append(_interior_lattice(K, n_interior))
    pts.append(np.zeros((1, dim)))
    return np.vstack(pts)


class _Placer:
    """Minimax Lloyd iterations on a fixed sample of ``K - ref``."""

    def __init__(self, K, points):
        self.K = K
        self.points = points
        if K.is_polytope:
            A, b = K.as_polytope().halfspaces0()
            self.A = A / b[:, None]
        else:
            self.A = None

    def gauges(self, X):
        Q = self.points
        if self.A is not None:
            proj = Q @ self.A.T
            XA = X @ self.A.T
            return np.maximum((proj[None, :, :] - XA[:, None, :]).max(axis=2), 0.0)
        diffs = (Q[None, :, :] - X[:, None, :]).reshape(-1, self.K.dim)
        return self.K._gauge0(diffs).reshape(len(X), len(Q))

    def gauges_and_grads(self, X):
        """Gauges ``(m, N)`` and their gradients with respect to the sample point ``(m, N, d)``."""
        Q = self.points
        if self.A is not None:
            vals = (Q @ self.A.T)[None, :, :] - (X @ self.A.T)[:, None, :]
            j = vals.argmax(axis=2)
            G = np.take_along_axis(vals, j[:, :, None], axis=2)[:, :, 0]
            dG = self.A[j] * (G > 0)[:, :, None]
            return np.maximum(G, 0.0), dG
        diffs = (Q[None, :, :] - X[:, None, :]).reshape(-1, self.K.dim)
        G = self.K._gauge0(diffs).reshape(len(X), len(Q))
        dG = self.K._gauge_grad0(diffs).reshape(len(X), len(Q), self.K.dim)
        return G, dG

    def smooth_descent(self, X, taus=(0.05, 0.02, 0.008, 0.003, 0.001), maxiter=150):
        """Minimise a log-sum-exp relaxation of the minimax objective at falling temperatures."""
        m, d = X.shape

        def f(z, tau):
            G, dG = self.gauges_and_grads(z.reshape(m, d))
            s = -tau * logsumexp(-G / tau, axis=0)
            w = np.exp((-G + s[None, :]) / tau)
            F = tau * logsumexp(s / tau)
            v = np.exp((s - F) / tau)
            grad = -np.einsum("p,ip,ipk->ik", v, w, dG)
            return F, grad.ravel()

        z = X.ravel().copy()
        for tau in taus:
            res = minimize(f, z, args=(tau,), jac=True, method="L-BFGS-B",
                           options={"maxiter": maxiter})
            z = res.x
        return z.reshape(m, d)

    def optimize(self, X, iters=60):
        Y = self.smooth_descent(X)
        if self.objective(Y) > self.objective(X):
            Y = X
        return self.lloyd(Y, iters=iters)

    def objective(self, X):
        return float(self.gauges(X).min(axis=0).max())

    def one_center(self, cluster, x0):
        if self.A is not None:
            d = self.K.dim
            A = self.A
            lhs = np.repeat(-A[None, :, :], len(cluster), axis=0).reshape(-1, d)
            lhs = np.hstack([lhs, -np.ones((len(lhs), 1))])
            rhs = -(cluster @ A.T).reshape(-1)
            res = linprog(np.r_[np.zeros(d), 1.0], A_ub=lhs, b_ub=rhs,
                          bounds=[(None, None)] * (d + 1), method="highs")
            if res.status == 0:
                return res.x[:d]
            return x0
        K = self.K

        def cons(z):
            return z[-1] - K._gauge0(cluster - z[:-1])

        def cons_jac(z):
            g = K._gauge_grad0(cluster - z[:-1])
            return np.hstack([g, np.ones((len(cluster), 1))])

        r0 = float(K._gauge0(cluster - x0).max())
        res = minimize(lambda z: z[-1], np.r_[x0, r0], jac=lambda z: np.r_[np.zeros(len(x0)), 1.0],
                       constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
                       method="SLSQP", options={"maxiter": 200, "ftol": 1e-12})
        x = res.x[:-1]
        if float(K._gauge0(cluster - x).max()) <= r0:
            return x
        return x0

    def lloyd(self, X, iters=60, tol=1e-10):
        X = X.copy()
        best = self.objective(X)
        for _ in range(iters):
            G = self.gauges(X)
            owner = np.argmin(G, axis=0)
            Y = X.copy()
            for i in range(len(X)):
                cl = self.points[owner == i]
                if len(cl):
                    Y[i] = self.one_center(cl, X[i])
            val = self.objective(Y)
            if val > best - tol:
                if val < best:
                    X, best = Y, val
                break
            X, best = Y, val
        return X, best

    def with_points(self, extra):
        return _Placer(self.K, np.vstack([self.points, extra]))


def _farthest_starts(points, m, rng, scale):
    first = rng.integers(len(points))
    idx = [int(first)]
    d = np.linalg.norm(points - points[first], axis=1)
    for _ in range(m - 1):
        j = int(np.argmax(d + 1e-9 * rng.random(len(d))))
        idx.append(j)
        d = np.minimum(d, np.linalg.norm(points - points[j], axis=1))
    return scale * points[idx]


def _random_start(K, m, rng, points, s):
    scale = (1 - volume_lower_bound(K, m)) * rng.uniform(0.8, 1.3)
    if s % 2 == 0:
        return _farthest_starts(points, m, rng, scale)
    return scale * points[rng.choice(len(points), m, replace=False)]


def _hexagon_starts(K, m):
    """Planar starts on the inscribed affine regular hexagon: a centre plus rings."""
    if K.dim != 2 or m < 4:
        return []
    try:
        H = inscribe_affine_hexagon(K)
    except HexagonError:
        return []
    o = H.center - K.reference_point
    V = H.vertices - H.center
    M = H.edge_midpoints - H.center
    out = []
    for t in (0.45, 0.55, 0.65):
        for ring in (V, M):
            X = np.vstack([o, o + t * ring])
            if m <= 7:
                # drop ring points symmetrically when fewer translates are asked for
                X = X[np.round(np.linspace(0, 6, m)).astype(int)] if m < 7 else X
            else:
                X = np.vstack([X, np.repeat(o[None, :], m - 7, axis=0)])
            out.append(X)
    return out


def _initial_configs(K, m, rng, count, points):
    """Structured hexagon starts, then farthest-point and random boundary picks."""
    starts = _hexagon_starts(K, m)
    starts.extend(_random_start(K, m, rng, points, s) for s in range(count))
    return starts


def _certify(K, placer, X, r_s, ceiling, deadline, depth, max_rounds=40, resolution=2e-5):
    """Verified ratio near ``r_s`` for placement ``X``; returns ``(r, X, cert)`` or None.

    Trial ratios climb ``r_s + delta`` until one verifies, then bisect towards
    the sampled optimum.  Every uncovered witness joins the sample and the
    placement is polished again, so the search behaves like a cutting-plane
    loop; the best verified placement is kept throughout.
    """
    best = None
    step = 0
    tries = 0
    lo = r_s
    for _ in range(max_rounds):
        if best is None:
            if step >= len(_DELTAS):
                return None
            r = r_s + _DELTAS[step]
        else:
            if best[0] - lo < resolution:
                break
            r = 0.5 * (lo + best[0])
        left = deadline - time.monotonic()
        if r >= ceiling or r > 1 or left <= 0:
            break
        cert = verify_cover(K, CoverConfig(r, X), max_depth=depth, time_limit=left)
        if cert.verdict == COVERED:
            best = (r, X.copy(), cert)
        elif cert.verdict == UNCOVERED:
            placer = placer.with_points((cert.witness - K.reference_point)[None, :])
            Y, r_new = placer.lloyd(X)
            if best is not None and r_new >= best[0]:
                lo = max(lo, r)
                continue
            X, r_s = Y, r_new
            lo = r_s
            tries += 1
            # the cutting-plane loop may crawl; widen the step after a few witnesses
            if best is None and (r_s + _DELTAS[step] <= r or tries >= _RETRIES):
                step += 1
                tries = 0
        else:
            if best is None:
                step += 1
            else:
                lo = r
    return best


def gamma_upper(K, m, budget=None, seed_config=None, max_depth=40, seed_certificate=None):
    """Verified upper bound on ``gamma_m(K)``.

    ``seed_config`` (typically the ``m - 1`` result) is padded with copies of
    its first centre, which keeps the chain ``r(m+1) <= r(m)``.  Padding
    leaves the union of translates unchanged, so a covered
    ``seed_certificate`` for the seed carries over as is; otherwise the
    padded seed is verified again.  If nothing verifies within the budget the
    trivial ``r = 1`` cover is returned.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    budget = budget or SearchBudget()
    # leave headroom for the final bookkeeping inside the caller's budget
    deadline = time.monotonic() + 0.95 * budget.max_time
    floor = volume_lower_bound(K, m)
    rng = np.random.default_rng(budget.seed)
    dim = K.dim
    best = (1.0, CoverConfig(1.0, np.zeros((m, dim))), trivial_certificate(K))
    if seed_config is not None:
        X = np.asarray(seed_config.centers, dtype=float)[:m]
        if len(X) < m:
            X = np.vstack([X, np.repeat(X[:1], m - len(X), axis=0)])
        if seed_certificate is not None and seed_certificate.covered and len(seed_config.centers) <= m:
            cert = seed_certificate
        else:
            cert = verify_cover(K, CoverConfig(seed_config.r, X), max_depth=max_depth,
                                time_limit=max(deadline - time.monotonic(), 1.0))
        if cert.verdict == COVERED:
            best = (seed_config.r, CoverConfig(seed_config.r, X), cert)
    if m == 1:
        return SearchResult(best[0], best[1], best[2], floor, 0)
    points = sample_body(K)
    placer = _Placer(K, points)
    starts = _initial_configs(K, m, rng, budget.starts, points)
    if seed_config is not None and best[0] < 1:
        starts.insert(0, best[1].centers)
    run = 0
    # after the fixed starts, keep restarting at random while time remains
    extra = (_random_start(K, m, rng, points, s) for s in itertools.count(len(starts)))
    for X0 in itertools.chain(starts, extra):
        if time.monotonic() > deadline:
            break
        run += 1
        X, r_s = placer.optimize(X0, iters=budget.max_iterations)
        if r_s + _DELTAS[0] >= best[0]:
            continue
        got = _certify(K, placer, X, r_s, best[0], deadline, max_depth)
        if got is not None and got[0] < best[0]:
            r, X, cert = got
            best = (r, CoverConfig(r, X), cert)
    r, cfg, cert = best
    return SearchResult(r, cfg, cert, floor, run)


def gamma_chain(K, ms, budget=None):
    """``gamma_upper`` for increasing ``m``, each run seeded with the previous result."""
    out = {}
    prev = None
    for m in sorted(ms):
        res = gamma_upper(K, m, budget, seed_config=None if prev is None else prev.config,
                          seed_certificate=None if prev is None else prev.certificate)
        out[m] = res
        prev = res
    return out
