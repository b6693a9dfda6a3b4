"""Convex body representations with gauge and support evaluation.

Every body carries a ``reference_point`` strictly inside it.  The gauge
(Minkowski functional) is measured relative to that point:
``gauge(p) = min{lam >= 0 : p in ref + lam * (K - ref)}``.
Internally most routines work with ``K0 = K - ref`` through ``gauge0`` and
``support0``; both accept a single vector or an ``(N, dim)`` batch.
"""

import math

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.spatial import QhullError
from scipy.special import gammaln

TAU_GEO = 1e-9
TAU_BOUNDARY = 1e-7


class DegenerateBodyError(ValueError):
    """Raised for bodies without interior."""

    def __init__(self, msg="empty interior"):
        super().__init__(msg)


def _as_batch(x, dim):
    a = np.asarray(x, dtype=float)
    single = a.ndim == 1
    a = np.atleast_2d(a)
    if a.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got {a.shape[1]}")
    return a, single


def _check_directions(u):
    if np.any(np.linalg.norm(u, axis=1) == 0.0):
        raise ValueError("support direction must be nonzero")


class ConvexBody:
    """Base class.  Subclasses implement ``_gauge0`` and ``_support``."""

    kind = "body"
    is_polytope = False

    dim: int
    reference_point: np.ndarray

    # -- public evaluation -------------------------------------------------
    def gauge(self, p):
        a, single = _as_batch(p, self.dim)
        g = self._gauge0(a - self.reference_point)
        return float(g[0]) if single else g

    def gauge0(self, q):
        a, single = _as_batch(q, self.dim)
        g = self._gauge0(a)
        return float(g[0]) if single else g

    def support(self, u):
        a, single = _as_batch(u, self.dim)
        _check_directions(a)
        h = self._support(a)
        return float(h[0]) if single else h

    def support0(self, u):
        a, single = _as_batch(u, self.dim)
        _check_directions(a)
        h = self._support(a) - a @ self.reference_point
        return float(h[0]) if single else h

    def contains(self, p, tol=TAU_GEO):
        return self.gauge(p) <= 1.0 + tol

    def boundary_points(self, directions):
        """Boundary points on rays from the reference point."""
        u = np.atleast_2d(np.asarray(directions, dtype=float))
        g = self._gauge0(u)
        return self.reference_point + u / g[:, None]

    def as_polytope(self):
        raise TypeError(f"{self.kind} is not a polytope")

    def _gauge_grad0(self, q, h=1e-7):
        """Gradient of the gauge of ``K - ref`` at the rows of ``q`` (central differences)."""
        out = np.empty_like(q)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            out[:, k] = (self._gauge0(q + e) - self._gauge0(q - e)) / (2 * h)
        return out

    def volume(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def _gauge0(self, q):
        raise NotImplementedError

    def _support(self, u):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# polytopes
# ---------------------------------------------------------------------------

def _unique_rows(a, decimals=9):
    """Indices of the first occurrence of each row after rounding."""
    _, idx = np.unique(np.round(a, decimals) + 0.0, axis=0, return_index=True)
    return np.sort(idx)


def _hull(points):
    pts = np.asarray(points, dtype=float)
    d = pts.shape[1]
    if len(pts) <= d:
        raise DegenerateBodyError()
    centered = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-12 * max(1.0, np.abs(pts).max())) < d:
        raise DegenerateBodyError()
    try:
        return ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateBodyError() from exc


def chebyshev_center(normals, offsets):
    """Largest inscribed ball of ``{x : normals @ x <= offsets}`` (unit normals)."""
    A = np.asarray(normals, dtype=float)
    b = np.asarray(offsets, dtype=float)
    d = A.shape[1]
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((len(A), 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(0, None)],
                  method="highs")
    if res.status != 0:
        raise DegenerateBodyError("empty interior (infeasible or unbounded H-representation)")
    return res.x[:d], float(res.x[-1])


class Polytope(ConvexBody):
    """A full-dimensional polytope holding both vertex and facet descriptions.

    ``normals`` are unit outer normals; the body is ``normals @ x <= offsets``.
    In the plane the vertices are kept in counter-clockwise order.
    """

    kind = "polytope"
    is_polytope = True

    def __init__(self, vertices, reference_point=None):
        hull = _hull(vertices)
        pts = np.asarray(vertices, dtype=float)
        self.dim = pts.shape[1]
        self.vertices = pts[hull.vertices]
        eq = hull.equations
        idx = _unique_rows(eq)
        self.normals = eq[idx, :-1]
        self.offsets = -eq[idx, -1]
        # boundary triangulation re-indexed into self.vertices
        remap = {int(v): i for i, v in enumerate(hull.vertices)}
        self.simplices = np.array([[remap[int(v)] for v in s] for s in hull.simplices])
        self._volume = float(hull.volume)
        if reference_point is None:
            reference_point = self.vertices.mean(axis=0)
        self.reference_point = np.asarray(reference_point, dtype=float)
        slack = self.offsets - self.normals @ self.reference_point
        if np.any(slack <= 0):
            raise ValueError("reference point is not strictly interior")

    def halfspaces0(self):
        """Facets of ``K - ref`` as ``(A, b)`` with ``b > 0``."""
        return self.normals, self.offsets - self.normals @ self.reference_point

    def _gauge0(self, q):
        A, b = self.halfspaces0()
        return np.maximum((q @ A.T / b).max(axis=1), 0.0)

    def _support(self, u):
        return (u @ self.vertices.T).max(axis=1)

    def as_polytope(self):
        return self

    def volume(self):
        return self._volume

    def to_json(self):
        return {"type": "vpolytope", "vertices": self.vertices.tolist(),
                "reference_point": self.reference_point.tolist()}


class VPolytope(Polytope):
    kind = "vpolytope"


class HPolytope(Polytope):
    """Polytope given by ``normals @ x <= offsets`` (normals need not be unit)."""

    kind = "hpolytope"

    def __init__(self, normals, offsets, reference_point=None):
        A = np.asarray(normals, dtype=float)
        b = np.asarray(offsets, dtype=float)
        scale = np.linalg.norm(A, axis=1)
        if np.any(scale == 0):
            raise ValueError("zero normal in H-representation")
        A, b = A / scale[:, None], b / scale
        center, radius = chebyshev_center(A, b)
        if radius <= TAU_GEO:
            raise DegenerateBodyError()
        hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), center)
        pts = hs.intersections
        pts = pts[_unique_rows(pts, 10)]
        super().__init__(pts, reference_point)
        self.input_normals, self.input_offsets = A, b

    def to_json(self):
        return {"type": "hpolytope", "normals": self.normals.tolist(),
                "offsets": self.offsets.tolist(), "reference_point": self.reference_point.tolist()}


def convert(K):
    """Switch between vertex and facet descriptions of the same polytope."""
    if isinstance(K, HPolytope):
        return VPolytope(K.vertices, K.reference_point)
    if isinstance(K, Polytope):
        return HPolytope(K.normals, K.offsets, K.reference_point)
    raise TypeError("convert expects a VPolytope or HPolytope")


# ---------------------------------------------------------------------------
# smooth and structured bodies
# ---------------------------------------------------------------------------

class LpBall(ConvexBody):
    """Unit ball of the l_p norm, ``p`` in ``[1, inf]``, centred at the origin."""

    kind = "lpball"

    def __init__(self, p, dim=3):
        p = float(p)
        if p < 1:
            raise ValueError("p must be >= 1")
        self.p = p
        self.dim = int(dim)
        self.reference_point = np.zeros(self.dim)
        self.is_polytope = p == 1.0 or math.isinf(p)
        self._poly = None

    @property
    def dual_exponent(self):
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    @staticmethod
    def _norm(x, p):
        if math.isinf(p):
            return np.abs(x).max(axis=1)
        if p == 1.0:
            return np.abs(x).sum(axis=1)
        m = np.abs(x).max(axis=1)
        safe = np.where(m > 0, m, 1.0)
        return m * ((np.abs(x) / safe[:, None]) ** p).sum(axis=1) ** (1.0 / p)

    def _gauge0(self, q):
        return self._norm(q, self.p)

    def _support(self, u):
        return self._norm(u, self.dual_exponent)

    def _gauge_grad0(self, q, h=1e-7):
        if self.is_polytope:
            return super()._gauge_grad0(q, h)
        g = self._gauge0(q)
        safe = np.where(g > 0, g, 1.0)[:, None]
        return np.sign(q) * (np.abs(q) / safe) ** (self.p - 1)

    def as_polytope(self):
        if not self.is_polytope:
            raise TypeError("lp ball with 1 < p < inf is not a polytope")
        if self._poly is None:
            signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * self.dim)).reshape(self.dim, -1).T
            if self.p == 1.0:
                verts = np.vstack([np.eye(self.dim), -np.eye(self.dim)])
            else:
                verts = signs
            self._poly = Polytope(verts, self.reference_point)
        return self._poly

    def volume(self):
        n, p = self.dim, self.p
        if math.isinf(p):
            return 2.0 ** n
        return math.exp(n * math.log(2.0) + n * gammaln(1 + 1 / p) - gammaln(1 + n / p))

    def to_json(self):
        return {"type": "lpball", "p": "inf" if math.isinf(self.p) else self.p, "dim": self.dim}


class Cone(ConvexBody):
    """Convex hull of a planar body placed in ``z = 0`` and an apex off that plane."""

    kind = "cone"

    def __init__(self, base, apex):
        if base.dim != 2:
            raise ValueError("cone base must be two-dimensional")
        apex = np.asarray(apex, dtype=float)
        if apex.shape != (3,) or abs(apex[2]) <= TAU_GEO:
            raise DegenerateBodyError("cone apex must lie off the base plane")
        self.base = base
        self.apex = apex
        self.dim = 3
        self.height = float(apex[2])
        b0 = np.append(base.reference_point, 0.0)
        self.reference_point = 0.75 * b0 + 0.25 * apex
        self.is_polytope = base.is_polytope
        self._poly = None
        if self.is_polytope:
            bv = base.as_polytope().vertices
            verts = np.vstack([np.column_stack([bv, np.zeros(len(bv))]), apex])
            self._poly = Polytope(verts, self.reference_point)

    def as_polytope(self):
        if self._poly is None:
            raise TypeError("cone over a non-polygonal base is not a polytope")
        return self._poly

    def _member_excess(self, p):
        w = p[:, 2] / self.height
        xy = p[:, :2] - w[:, None] * self.apex[:2] - (1 - w)[:, None] * self.base.reference_point
        g = self.base._gauge0(xy)
        return np.maximum(-w, g + w - 1.0)

    def _gauge0(self, q):
        if self._poly is not None:
            return self._poly._gauge0(q)
        # convex membership along each ray: bisection on the scale factor
        hi = np.ones(len(q))
        for _ in range(200):
            out = self._member_excess(self.reference_point + q / hi[:, None]) > 0
            if not out.any():
                break
            hi = np.where(out, hi * 2.0, hi)
        lo = np.zeros(len(q))
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            safe = np.where(mid > 0, mid, 1.0)
            inside = self._member_excess(self.reference_point + q / safe[:, None]) <= 0
            hi = np.where(inside, mid, hi)
            lo = np.where(inside, lo, mid)
        return np.where(np.linalg.norm(q, axis=1) == 0, 0.0, hi)

    def _support(self, u):
        return np.maximum(_safe_base_support(self.base, u[:, :2]), u @ self.apex)

    def volume(self):
        return self.base.volume() * abs(self.height) / 3.0

    def to_json(self):
        return {"type": "cone", "base": self.base.to_json(), "apex": self.apex.tolist()}


def _safe_base_support(base, u2):
    out = np.zeros(len(u2))
    nz = np.any(u2 != 0, axis=1)
    if nz.any():
        out[nz] = base._support(u2[nz])
    return out


class AffineImage(ConvexBody):
    """Image ``matrix @ x + shift`` of another body."""

    kind = "affine"

    def __init__(self, matrix, shift, inner):
        M = np.asarray(matrix, dtype=float)
        if M.shape != (inner.dim, inner.dim):
            raise ValueError("matrix shape does not match inner body")
        if abs(np.linalg.det(M)) <= 1e-14:
            raise DegenerateBodyError("empty interior (singular matrix)")
        self.matrix = M
        self.shift = np.asarray(shift, dtype=float)
        self.inner = inner
        self.dim = inner.dim
        self._inv = np.linalg.inv(M)
        self.reference_point = M @ inner.reference_point + self.shift
        self.is_polytope = inner.is_polytope
        self._poly = None

    def as_polytope(self):
        if self._poly is None:
            P = self.inner.as_polytope()
            self._poly = Polytope(P.vertices @ self.matrix.T + self.shift, self.reference_point)
        return self._poly

    def _gauge0(self, q):
        return self.inner._gauge0(q @ self._inv.T)

    def _support(self, u):
        return self.inner._support(u @ self.matrix) + u @ self.shift

    def _gauge_grad0(self, q, h=1e-7):
        return self.inner._gauge_grad0(q @ self._inv.T, h) @ self._inv

    def volume(self):
        return abs(np.linalg.det(self.matrix)) * self.inner.volume()

    def to_json(self):
        return {"type": "affine", "matrix": self.matrix.tolist(), "shift": self.shift.tolist(),
                "inner": self.inner.to_json()}


class ReuleauxPolygon(ConvexBody):
    """Width-1 Reuleaux polygon over a regular ``k``-gon centred at the origin.

    It is the intersection of the unit discs centred at the polygon vertices;
    each boundary arc is centred at the vertex opposite to it.
    """

    kind = "reuleaux"

    def __init__(self, k):
        k = int(k)
        if k < 3 or k % 2 == 0:
            raise ValueError("Reuleaux polygons need an odd k >= 3")
        self.k = k
        self.dim = 2
        self.circumradius = 1.0 / (2.0 * math.cos(math.pi / (2 * k)))
        ang = math.pi / 2 + 2 * math.pi * np.arange(k) / k
        self.vertices = self.circumradius * np.column_stack([np.cos(ang), np.sin(ang)])
        self.arc_centers = self.vertices
        self.arc_radii = np.ones(k)
        self.reference_point = np.zeros(2)

    def _gauge0(self, q):
        qq = (q * q).sum(axis=1)
        qc = q @ self.vertices.T
        cc = (self.vertices ** 2).sum(axis=1)
        disc = qc ** 2 - qq[:, None] * (cc - 1.0)[None, :]
        denom = qc + np.sqrt(np.maximum(disc, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(qq[:, None] > 0, qq[:, None] / denom, 0.0)
        return g.max(axis=1)

    def _support(self, u):
        norm = np.linalg.norm(u, axis=1)
        vert = u @ self.vertices.T
        vhat = self.vertices / self.circumradius
        in_arc = (-(u @ vhat.T)) >= norm[:, None] * math.cos(math.pi / (2 * self.k)) - 1e-15
        arc = np.where(in_arc, vert + norm[:, None], -np.inf)
        return np.maximum(vert.max(axis=1), arc.max(axis=1))

    def area(self):
        k, alpha = self.k, math.pi / self.k
        polygon = 0.5 * k * self.circumradius ** 2 * math.sin(2 * math.pi / k)
        return polygon + k * 0.5 * (alpha - math.sin(alpha))

    def volume(self):
        return self.area()

    def boundary_samples(self, n):
        """``n`` points spread along the arcs (arc-length proportional)."""
        k = self.k
        per = np.full(k, n // k)
        per[: n % k] += 1
        pts = []
        half = math.pi / (2 * k)
        for j in range(k):
            c = self.vertices[j]
            mid = math.atan2(-c[1], -c[0])
            t = np.linspace(mid - half, mid + half, per[j], endpoint=False)
            pts.append(c + np.column_stack([np.cos(t), np.sin(t)]))
        return np.vstack(pts)

    def to_json(self):
        return {"type": "reuleaux", "k": self.k}


# ---------------------------------------------------------------------------
# JSON ingestion
# ---------------------------------------------------------------------------

def body_from_json(obj):
    """Build a body from the canonical JSON object."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("body JSON must be an object with a 'type' field")
    t = obj["type"]
    ref = obj.get("reference_point")
    if t == "vpolytope":
        return VPolytope(obj["vertices"], ref)
    if t == "hpolytope":
        return HPolytope(obj["normals"], obj["offsets"], ref)
    if t == "lpball":
        p = obj["p"]
        p = math.inf if p in ("inf", "Infinity", None) else float(p)
        return LpBall(p, int(obj.get("dim", 3)))
    if t == "cone":
        return Cone(body_from_json(obj["base"]), obj["apex"])
    if t == "affine":
        return AffineImage(obj["matrix"], obj["shift"], body_from_json(obj["inner"]))
    if t == "reuleaux":
        return ReuleauxPolygon(int(obj["k"]))
    raise ValueError(f"unknown body type {t!r}")


# ---------------------------------------------------------------------------
# stock bodies
# ---------------------------------------------------------------------------

def regular_polygon(k, radius=1.0, phase=0.0):
    ang = phase + 2 * math.pi * np.arange(k) / k
    return VPolytope(radius * np.column_stack([np.cos(ang), np.sin(ang)]), np.zeros(2))


def square(half=1.0):
    return VPolytope(half * np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=float), np.zeros(2))


def triangle():
    """Regular triangle with circumradius 1 centred at the origin."""
    return regular_polygon(3, 1.0, math.pi / 2)


def cube(half=1.0):
    return LpBall(math.inf, 3) if half == 1.0 else AffineImage(half * np.eye(3), np.zeros(3), LpBall(math.inf, 3))


def regular_tetrahedron():
    """Regular tetrahedron with circumradius 1, centroid at the origin."""
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / math.sqrt(3)
    return VPolytope(v, np.zeros(3))


def random_polygon(rng, k, radius_spread=0.5):
    """Random convex polygon containing the origin (hull of jittered points on rays)."""
    while True:
        ang = np.sort(rng.uniform(0, 2 * math.pi, k))
        rad = 1.0 - radius_spread * rng.uniform(0, 1, k)
        pts = rad[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
        try:
            P = VPolytope(pts, np.zeros(2))
        except (ValueError, DegenerateBodyError):
            continue
        if len(P.vertices) >= 3:
            return P


def random_polytope3(rng, k=20):
    while True:
        pts = rng.standard_normal((k, 3))
        pts *= rng.uniform(0.5, 1.0, (k, 1)) / np.linalg.norm(pts, axis=1, keepdims=True)
        try:
            return VPolytope(pts, np.zeros(3))
        except (ValueError, DegenerateBodyError):
            continue
