"""Wireframe rendering: class-colored translucent rectangles over a canvas.

Output is a plain uint8 RGB array at canvas resolution; saving it with any
deterministic encoder (the CLI uses PNG) yields byte-identical files for
identical inputs. Rectangles rasterize with the same pixel-center rule as
the coverage metrics, so a rendered box tints exactly the pixels the
metrics consider covered.
"""

from __future__ import annotations

import numpy as np

from .model import ElementClass, Layout
from .raster import box_pixel_bounds
from .validation import check_layout

# Fixed class colors (RGB) and overlay alpha; stable across versions so
# renders diff cleanly.
CLASS_COLORS: dict[ElementClass, tuple[int, int, int]] = {
    ElementClass.TEXT: (214, 39, 40),
    ElementClass.LOGO: (31, 119, 180),
    ElementClass.UNDERLAY: (44, 160, 44),
}
OVERLAY_ALPHA = 0.35

BLANK_FIELD = 255  # white


def render_layout(
    layout: Layout,
    canvas: np.ndarray | None = None,
    alpha: float = OVERLAY_ALPHA,
) -> np.ndarray:
    """Blend the layout's rectangles over the canvas (or a blank field).

    Underlays draw first (they sit beneath everything), then the remaining
    elements, each group in index order. PAD entries are skipped. ``canvas``
    must be a (canvas_h, canvas_w, 3) uint8 array when given.
    """
    check_layout(layout)
    h, w = layout.canvas_h, layout.canvas_w
    if canvas is None:
        base = np.full((h, w, 3), BLANK_FIELD, dtype=np.uint8)
    else:
        canvas = np.asarray(canvas)
        if canvas.shape != (h, w, 3):
            raise ValueError(
                f"canvas array is {canvas.shape}, expected ({h}, {w}, 3)"
            )
        base = canvas.astype(np.uint8, copy=True)

    drawable = [e for e in layout.elements if e.cls is not ElementClass.PAD]
    ordered = sorted(
        drawable,
        key=lambda e: (0 if e.cls is ElementClass.UNDERLAY else 1, e.index),
    )
    out = base.astype(np.float64)
    for e in ordered:
        color = np.array(CLASS_COLORS[e.cls], dtype=np.float64)
        x0, x1, y0, y1 = box_pixel_bounds(e.box, w, h)
        if x0 >= x1 or y0 >= y1:
            continue
        patch = out[y0:y1, x0:x1]
        out[y0:y1, x0:x1] = (1.0 - alpha) * patch + alpha * color
    return np.rint(out).clip(0, 255).astype(np.uint8)
