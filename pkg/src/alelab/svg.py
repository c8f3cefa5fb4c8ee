"""Minimal SVG output for cluster boundaries."""
from __future__ import annotations

import numpy as np


def _fmt(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".")


def polyline_svg(curves, size: int = 600, margin: float = 0.05, stroke: str = "black",
                 width: float = 0.75, title: str | None = None) -> str:
    """SVG document drawing each complex polyline in ``curves``.

    The view box is fitted to the union of the curves with a relative
    margin; the y axis is flipped so the picture matches the complex plane.
    """
    curves = [np.asarray(c, dtype=complex) for c in curves if np.size(c)]
    if curves:
        allp = np.concatenate(curves)
        lo_x, hi_x = allp.real.min(), allp.real.max()
        lo_y, hi_y = allp.imag.min(), allp.imag.max()
    else:
        lo_x = lo_y = -1.0
        hi_x = hi_y = 1.0
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12) * (1 + 2 * margin)
    cx, cy = 0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)
    scale = size / span

    def pts(c):
        x = (c.real - cx) * scale + size / 2
        y = size / 2 - (c.imag - cy) * scale
        return " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, y))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<rect width="{size}" height="{size}" fill="white"/>')
    for c in curves:
        out.append(f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}" points="{pts(c)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def parse_polylines(text: str) -> list:
    """Read back the polylines written by ``polyline_svg`` (in SVG pixel coordinates)."""
    import re

    out = []
    for m in re.finditer(r'points="([^"]*)"', text):
        xy = [tuple(map(float, p.split(","))) for p in m.group(1).split()]
        out.append(np.array([complex(x, y) for x, y in xy]))
    return out
