"""Single-channel rasters and pixel-center coverage rasterization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection

import numpy as np

from .geometry import is_valid
from .model import BBox, ElementClass, Layout

# ITU-R 601 luminance weights used when reducing color images.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True, eq=False)
class Raster:
    """A (height, width) float64 array with every value finite in [0, 1].

    Used both for saliency maps and for canvas luminance. Treat instances as
    immutable; operations return new rasters.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"raster must be 2-D, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("raster must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("raster contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError(
                f"raster values outside [0, 1]: min {arr.min()}, max {arr.max()}"
            )
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @classmethod
    def full(cls, width: int, height: int, value: float) -> "Raster":
        return cls(np.full((height, width), float(value)))

    def inverted(self) -> "Raster":
        """Per-pixel complement 1 - v."""
        return Raster(1.0 - self.values)


def check_raster_dims(
    raster: Raster, width: int, height: int, name: str = "raster"
) -> Raster:
    if raster.width != width or raster.height != height:
        raise ValueError(
            f"{name} is {raster.width}x{raster.height}, expected "
            f"{width}x{height}"
        )
    return raster


def composite_saliency(s1: Raster, s2: Raster) -> Raster:
    """Pixel-wise maximum of two equally sized saliency maps."""
    if (s1.width, s1.height) != (s2.width, s2.height):
        raise ValueError(
            f"saliency dimensions differ: {s1.width}x{s1.height} vs "
            f"{s2.width}x{s2.height}"
        )
    return Raster(np.maximum(s1.values, s2.values))


def box_pixel_bounds(
    box: BBox, raster_w: int, raster_h: int, scale: int = 1
) -> tuple[int, int, int, int]:
    """Index ranges (x0, x1, y0, y1) of pixels whose centers fall in ``box``.

    Pixel (i, j) of a raster at ``scale`` times canvas resolution has its
    center at canvas coordinates ((j + 0.5)/scale, (i + 0.5)/scale); it is
    covered when x1 <= cx < x2 and y1 <= cy < y2. Ranges are half-open and
    clamped to the raster.
    """
    x0 = max(0, math.ceil(scale * box.x1 - 0.5))
    x1 = min(raster_w, math.ceil(scale * box.x2 - 0.5))
    y0 = max(0, math.ceil(scale * box.y1 - 0.5))
    y1 = min(raster_h, math.ceil(scale * box.y2 - 0.5))
    return x0, max(x0, x1), y0, max(y0, y1)


def rasterize_coverage(
    layout: Layout,
    classes: Collection[ElementClass] | None = None,
    scale: int = 1,
) -> np.ndarray:
    """Boolean mask of pixels covered by the layout's valid elements.

    ``classes`` restricts which element classes participate (None means all
    non-PAD classes). The mask has shape (canvas_h*scale, canvas_w*scale)
    and uses the pixel-center rule, which is exact on integer boxes.
    """
    if not isinstance(scale, int) or scale < 1:
        raise ValueError(f"scale must be a positive integer, got {scale!r}")
    h = layout.canvas_h * scale
    w = layout.canvas_w * scale
    mask = np.zeros((h, w), dtype=bool)
    wanted = None if classes is None else set(classes)
    for e in layout.elements:
        if wanted is not None and e.cls not in wanted:
            continue
        if not is_valid(e, layout.canvas_w, layout.canvas_h):
            continue
        x0, x1, y0, y1 = box_pixel_bounds(e.box, w, h, scale)
        mask[y0:y1, x0:x1] = True
    return mask


def gradient_magnitude(values: np.ndarray) -> np.ndarray:
    """Normalized gradient magnitude of a [0, 1] luminance array.

    Central differences with replicated borders on both axes, magnitude
    sqrt(gx^2 + gy^2) scaled by 1/sqrt(2).
    """
    padded = np.pad(values, 1, mode="edge")
    gx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    gy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    return np.sqrt(gx * gx + gy * gy) / math.sqrt(2.0)
