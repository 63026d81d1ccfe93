"""Minimal SVG rendering of 2-D reach sets, unsafe regions and trajectories."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .geometry import Polytope

REACH_FILL = "#2ca02c"
UNSAFE_FILL = "#d62728"
MARKER = "#1f77b4"

WIDTH = 640
HEIGHT = 640


def _ordered_polygon(P: Polytope) -> np.ndarray:
    """Vertices in counter-clockwise order around their centroid."""
    V = P.vertices
    if len(V) < 3:
        return V
    c = V.mean(axis=0)
    ang = np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0])
    return V[np.argsort(ang, kind="stable")]


def _n(v: float) -> str:
    return f"{v:.3f}"


def render(reach_parts, unsafe_parts=(), trajectories=None, title: str = "") -> str:
    """SVG text for the given polytopes; all inputs must be 2-D.

    The viewport covers the data extents plus a 10% margin; the y axis points up.
    """
    reach_parts = list(reach_parts)
    unsafe_parts = list(unsafe_parts)
    for P in reach_parts + unsafe_parts:
        if P.dim != 2:
            raise ValueError("2D plotting only")
    pts = [P.vertices for P in reach_parts + unsafe_parts]
    if trajectories is not None and len(trajectories):
        T = np.asarray(trajectories, dtype=float)
        if T.shape[-1] != 2:
            raise ValueError("2D plotting only")
        pts.append(T.reshape(-1, 2))
    if not pts:
        raise ValueError("nothing to plot")
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    lo, hi = lo - 0.1 * span, hi + 0.1 * span
    sx = WIDTH / (hi[0] - lo[0])
    sy = HEIGHT / (hi[1] - lo[1])

    def to_px(p):
        return (p[0] - lo[0]) * sx, (hi[1] - p[1]) * sy

    def poly(P, fill, cls, opacity):
        V = _ordered_polygon(P)
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in map(to_px, V))
        return (f'<polygon class="{cls}" points="{coords}" fill="{fill}" fill-opacity="{opacity}" '
                f'stroke="{fill}" stroke-width="1"/>')

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-xmin="{lo[0]:.17g}" data-xmax="{hi[0]:.17g}" '
        f'data-ymin="{lo[1]:.17g}" data-ymax="{hi[1]:.17g}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append('<g id="reach">')
    out += [poly(P, REACH_FILL, "reach", 0.6) for P in reach_parts]
    out.append("</g>")
    out.append('<g id="unsafe">')
    out += [poly(P, UNSAFE_FILL, "unsafe", 0.6) for P in unsafe_parts]
    out.append("</g>")
    if trajectories is not None and len(trajectories):
        out.append('<g id="trajectories" stroke="%s" stroke-width="1">' % MARKER)
        for x, y in map(to_px, T.reshape(-1, 2)):
            out.append(f'<path d="M{_n(x - 3)},{_n(y)}h6M{_n(x)},{_n(y - 3)}v6"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
