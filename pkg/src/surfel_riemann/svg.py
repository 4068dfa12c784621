"""Static SVG drawing of the image of a surface under a planar map."""

from __future__ import annotations

import numpy as np

from .conformal import ConformalStructure
from .dec import Cochain
from .operators import conformal_density


def _colour(t: float) -> str:
    # white -> orange -> dark red
    stops = np.array([[255, 255, 255], [253, 141, 60], [128, 0, 38]], dtype=float)
    t = min(max(t, 0.0), 1.0) * 2
    i = min(int(t), 1)
    rgb = stops[i] + (t - i) * (stops[i + 1] - stops[i])
    return "#%02x%02x%02x" % tuple(int(round(c)) for c in rgb)


def image_svg(f: Cochain, structure: ConformalStructure, size: int = 600,
              margin: int = 20) -> str:
    """One polygon per surfel at ``f`` of its corners.

    Polygons are shaded by the surfel's share of the conformal energy,
    normalised by the largest share (all white when the map is
    holomorphic). The imaginary axis points up.
    """
    g = f.graph
    z = f.values
    density = conformal_density(f, structure)
    top = float(np.max(density, initial=0.0))
    # densities at rounding level count as zero
    scale_e = top if top > 1e-12 * max(1.0, float(np.sum(np.abs(z) ** 2))) else 0.0

    lo = np.array([z.real.min(), z.imag.min()])
    hi = np.array([z.real.max(), z.imag.max()])
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    k = (size - 2 * margin) / span

    def pt(w: complex) -> str:
        x = margin + (w.real - lo[0]) * k
        y = size - margin - (w.imag - lo[1]) * k
        return f"{x:.4f},{y:.4f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="#f7f7f7"/>',
    ]
    for s, q in enumerate(g.quads):
        t = density[s] / scale_e if scale_e else 0.0
        pts = " ".join(pt(z[i]) for i in q)
        out.append(
            f'<polygon points="{pts}" fill="{_colour(t)}" stroke="#333333" '
            f'stroke-width="0.5"><title>{g.surfel_labels[s]}</title></polygon>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
