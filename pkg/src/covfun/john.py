"""Loewner ellipsoids and John-position normalization."""

from dataclasses import dataclass, field

import numpy as np

from .bodies import TAU_GEO, AffineImage, Polytope
from .directions import direction_grid


@dataclass(frozen=True)
class Ellipsoid:
    """``{x : (x - center)^T inv(shape) (x - center) <= 1}``; ``shape`` is SPD."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        if np.linalg.eigvalsh(self.shape).min() <= 0:
            raise ValueError("ellipsoid shape must be positive definite")

    def contains(self, points, tol=1e-12):
        d = np.atleast_2d(points) - self.center
        return np.einsum("ij,jk,ik->i", d, np.linalg.inv(self.shape), d) <= 1 + tol

    def volume_factor(self):
        return float(np.sqrt(np.linalg.det(self.shape)))


@dataclass
class AffineCert:
    """An affine map ``x -> matrix @ x + shift`` with a record of what was checked."""

    matrix: np.ndarray
    shift: np.ndarray
    verified_inner: bool = False
    verified_outer: bool = False
    sample_count: int = 0
    details: dict = field(default_factory=dict)

    def apply(self, x):
        return np.asarray(x) @ self.matrix.T + self.shift

    def to_json(self):
        return {"matrix": self.matrix.tolist(), "shift": self.shift.tolist(),
                "verified_inner": self.verified_inner, "verified_outer": self.verified_outer,
                "sample_count": self.sample_count, **self.details}


class NormalizationError(RuntimeError):
    def __init__(self, msg, direction=None):
        super().__init__(msg)
        self.direction = direction


def lowner_ellipsoid(points, rtol=1e-11, max_iter=200_000):
    """Minimum-volume enclosing ellipsoid by Khachiyan's reweighting.

    Uses the Todd-Yildirim away steps; stops once both the up and the away
    optimality gaps drop below ``rtol``.  The result is scaled afterwards so
    that it contains every input point exactly.
    """
    P = np.asarray(points, dtype=float)
    N, d = P.shape
    Q = np.vstack([P.T, np.ones(N)])
    u = np.full(N, 1.0 / N)
    for _ in range(max_iter):
        X = (Q * u) @ Q.T
        M = np.einsum("ij,ji->i", Q.T @ np.linalg.inv(X), Q)
        j = int(np.argmax(M))
        active = u > 0
        k = int(np.argmin(np.where(active, M, np.inf)))
        eps_up = M[j] / (d + 1) - 1
        eps_down = 1 - M[k] / (d + 1)
        if max(eps_up, eps_down) < rtol:
            break
        if eps_up >= eps_down or M[k] <= 1 + 1e-12:
            i, tau = j, (M[j] - d - 1) / ((d + 1) * (M[j] - 1))
        else:
            tau = (M[k] - d - 1) / ((d + 1) * (M[k] - 1))
            i, tau = k, max(tau, -u[k] / (1 - u[k]))
        u *= 1 - tau
        u[i] += tau
        u[i] = max(u[i], 0.0)
    c = P.T @ u
    S = d * ((P.T * u) @ P - np.outer(c, c))
    diff = P - c
    scale = np.einsum("ij,jk,ik->i", diff, np.linalg.inv(S), diff).max()
    return Ellipsoid(c, S * scale)


def _sqrtm_inv(S):
    w, V = np.linalg.eigh(S)
    return (V / np.sqrt(w)) @ V.T


def _sample_points(K, n=None):
    if K.is_polytope:
        return K.as_polytope().vertices
    n = n or (1024 if K.dim == 2 else 4000)
    return K.boundary_points(direction_grid(K.dim, n))


def normalized_body(K, matrix, shift):
    """``matrix @ K + shift``; polytopes come back as vertex polytopes about the origin."""
    if K.is_polytope:
        P = K.as_polytope()
        return Polytope(P.vertices @ matrix.T + shift, np.zeros(K.dim))
    return AffineImage(matrix, shift, K)


def john_normalize(K, grid=None):
    """Affine map ``T`` with ``B^n subset T(K) subset n B^n``.

    Built from the Loewner ellipsoid of the vertices (polytopes) or of a
    boundary sample (other bodies) and rescaled so that the inradius about
    the origin is exactly one.  Polytopes are checked exactly through their
    facets and vertices; other bodies on a direction grid.  Returns
    ``(AffineCert, K')``; polytope images carry the origin as reference point.
    """
    n = K.dim
    E = lowner_ellipsoid(_sample_points(K))
    L = n * _sqrtm_inv(E.shape)
    shift = -L @ E.center
    grid = grid or (2 ** 14 if n == 2 else 10_000)
    dirs = direction_grid(n, grid)
    if K.is_polytope:
        Kp = normalized_body(K, L, shift)
        r_in = float(Kp.offsets.min())
        L, shift = L / r_in, shift / r_in
        Kp = normalized_body(K, L, shift)
        inner_gap = float(Kp.offsets.min())
        norms = np.linalg.norm(Kp.vertices, axis=1)
        outer = float(norms.max())
        worst_in = Kp.normals[np.argmin(Kp.offsets)]
        worst_out = Kp.vertices[np.argmax(norms)]
        count = len(Kp.vertices) + len(Kp.offsets)
    else:
        Kp = normalized_body(K, L, shift)
        h = Kp.support(dirs)
        r_in = float(h.min())
        L, shift = L / r_in, shift / r_in
        Kp = normalized_body(K, L, shift)
        h = Kp.support(dirs)
        inner_gap = float(h.min())
        outer = float(h.max())
        worst_in = dirs[np.argmin(h)]
        worst_out = dirs[np.argmax(h)]
        count = len(dirs)
    ok_in = inner_gap >= 1 - TAU_GEO
    ok_out = outer <= n + TAU_GEO
    if not ok_in:
        raise NormalizationError(f"inner ball check failed (support {inner_gap:.12g})", worst_in)
    if not ok_out:
        raise NormalizationError(f"outer ball check failed (norm {outer:.12g} > {n})", worst_out)
    cert = AffineCert(L, shift, ok_in, ok_out, count,
                      {"inradius": inner_gap, "outer_radius": outer})
    return cert, Kp
