"""Self-contained SVG scatter plots (no plotting dependency).

Fixed viewport derived from a padded bounding box; equal aspect ratio;
layers drawn in the order given (range curves first, limit support next,
eigenvalues last, matching the paper-style color scheme).  Output is fully
deterministic: no timestamps, fixed float formatting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import padded_bbox

__all__ = ["ScatterLayer", "render_scatter"]


@dataclass(frozen=True)
class ScatterLayer:
    points: np.ndarray
    color: str
    radius: float = 1.6
    label: str = ""


def render_scatter(
    layers: list[ScatterLayer],
    width: int = 720,
    height: int = 720,
    bbox: tuple[float, float, float, float] | None = None,
) -> str:
    """Render layers into an SVG document string."""
    if not layers:
        raise ValueError("need at least one layer")
    if bbox is None:
        allpts = np.concatenate([np.asarray(l.points).ravel() for l in layers])
        bbox = padded_bbox(allpts, pad=0.08)
    re_min, re_max, im_min, im_max = bbox
    span_re = max(re_max - re_min, 1e-12)
    span_im = max(im_max - im_min, 1e-12)
    scale = min((width - 40) / span_re, (height - 40) / span_im)
    x0 = 0.5 * (re_min + re_max)
    y0 = 0.5 * (im_min + im_max)

    def to_px(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xs = (pts.real - x0) * scale + width / 2.0
        ys = height / 2.0 - (pts.imag - y0) * scale
        return xs, ys

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="10" y="10" width="{width - 20}" height="{height - 20}" '
        'fill="none" stroke="#cccccc" stroke-width="1"/>',
    ]
    for layer in layers:
        pts = np.asarray(layer.points, dtype=np.complex128).ravel()
        if pts.size == 0:
            continue
        title = f"<title>{layer.label}</title>" if layer.label else ""
        out.append(f'<g fill="{layer.color}" fill-opacity="0.75">{title}')
        xs, ys = to_px(pts)
        r = f"{layer.radius:.2f}"
        for x, y in zip(xs, ys):
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out)
