"""Outlines of planar bodies and homothets, and a byte-deterministic SVG writer."""

import numpy as np
from scipy.optimize import minimize

from .directions import circle_directions

CANVAS = 800
MARGIN = 0.05
OUTLINE_RAYS = 720
_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf")


def _ray_outline(level_fn, center, rays=OUTLINE_RAYS):
    """Boundary of ``{p : level_fn(p) <= 1}`` along rays from an interior ``center``."""
    U = circle_directions(rays)
    lo = np.zeros(rays)
    hi = np.ones(rays)
    while True:
        out = level_fn(center + U * hi[:, None]) > 1.0
        if out.all():
            break
        hi = np.where(out, hi, 2 * hi)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        inside = level_fn(center + U * mid[:, None]) <= 1.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return center + U * lo[:, None]


def _slice_fn(K, z):
    def fn(pts):
        return K.gauge(np.column_stack([pts, np.full(len(pts), z)]))
    return fn


def _interior_point(fn, start):
    res = minimize(lambda p: float(fn(p[None, :])[0]), start, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
    if float(fn(res.x[None, :])[0]) >= 1.0:
        raise ValueError("the slice plane misses the body")
    return res.x


def body_outline(K, z=None):
    """Closed outline of a planar body, or of the slice ``{x_3 = z}`` of a 3-D body."""
    if K.dim == 2:
        if K.is_polytope:
            return K.as_polytope().vertices.copy()
        return K.boundary_points(circle_directions(OUTLINE_RAYS))
    if z is None:
        raise ValueError("3-D bodies need a slice height")
    fn = _slice_fn(K, z)
    c = _interior_point(fn, K.reference_point[:2])
    return _ray_outline(fn, c)


def translate_outlines(K, cfg, z=None):
    """Outlines of ``x_i + ref + r (K - ref)`` (sliced at ``z`` for 3-D bodies)."""
    out = []
    ref = K.reference_point
    for x in cfg.centers:
        if K.dim == 2:
            base = body_outline(K)
            out.append(x + ref + cfg.r * (base - ref))
            continue

        def fn(pts, x=x):
            P = np.column_stack([pts, np.full(len(pts), z)])
            return K.gauge0(P - x - ref) / cfg.r
        try:
            c = _interior_point(fn, (x + ref)[:2])
        except ValueError:
            continue
        out.append(_ray_outline(fn, c))
    return out


def _fmt(v):
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def svg_document(body, translates, witness=None, title=None):
    """SVG text: body outline in black, translates in colour, a red witness marker."""
    pts = np.vstack([body] + list(translates))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo))
    scale = CANVAS * (1 - 2 * MARGIN) / span
    mid = 0.5 * (lo + hi)

    def tx(P):
        P = np.atleast_2d(P)
        x = CANVAS / 2 + (P[:, 0] - mid[0]) * scale
        y = CANVAS / 2 - (P[:, 1] - mid[1]) * scale
        return " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, y))

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
             f'viewBox="0 0 {CANVAS} {CANVAS}">',
             f'<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>']
    if title:
        lines.append(f'<title>{title}</title>')
    lines.append(f'<polygon points="{tx(body)}" fill="#eeeeee" stroke="black" stroke-width="2"/>')
    for i, T in enumerate(translates):
        col = _COLORS[i % len(_COLORS)]
        lines.append(f'<polygon points="{tx(T)}" fill="none" stroke="{col}" stroke-width="1.5"/>')
    if witness is not None:
        x, y = tx(witness[:2]).split(",")
        lines.append(f'<circle cx="{x}" cy="{y}" r="6" fill="red" stroke="none"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_cover_svg(K, cfg, witness=None, z=None):
    if K.dim == 3 and z is None:
        raise ValueError("3-D bodies need a slice height")
    body = body_outline(K, z)
    return svg_document(body, translate_outlines(K, cfg, z), witness,
                        title=f"m={cfg.m} r={cfg.r:.6g}" + ("" if z is None else f" z={z:g}"))


def polygon_count(svg):
    return svg.count("<polygon")
