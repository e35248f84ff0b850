"""Exact axis-aligned rectangle geometry.

All functions are pure and assume canonical boxes (x1 <= x2, y1 <= y2)
unless noted; run :func:`canonicalize` first for raw annotation data. On
integer-valued coordinates every area, intersection, and ratio here is exact
(products stay far below the float53 limit), which is what lets the metric
suite be checked against brute-force pixel counting to 1e-9.
"""

from __future__ import annotations

from dataclasses import replace

from .model import BBox, CenterBox, Element, ElementClass, Layout

# Strict lower bound on in-canvas area, as a fraction of the canvas, for an
# element to count as valid. Boundary-equal area is invalid.
VALIDITY_AREA_FRACTION = 0.001


def canonicalize(box: BBox) -> BBox:
    """Swap coordinate pairs so that x1 <= x2 and y1 <= y2. Idempotent."""
    x1, x2 = (box.x1, box.x2) if box.x1 <= box.x2 else (box.x2, box.x1)
    y1, y2 = (box.y1, box.y2) if box.y1 <= box.y2 else (box.y2, box.y1)
    if (x1, y1, x2, y2) == box.as_tuple():
        return box
    return BBox(x1, y1, x2, y2)


def canonicalize_layout(layout: Layout) -> Layout:
    """Canonicalize every element box; canvas and indices are untouched."""
    elements = tuple(
        replace(e, box=canonicalize(e.box)) for e in layout.elements
    )
    return replace(layout, elements=elements)


def box_area(box: BBox) -> float:
    """Area of a canonical box in px^2."""
    return max(0.0, box.x2 - box.x1) * max(0.0, box.y2 - box.y1)


def intersection_area(a: BBox, b: BBox) -> float:
    """Overlap area of two canonical boxes; 0 when disjoint."""
    w = min(a.x2, b.x2) - max(a.x1, b.x1)
    h = min(a.y2, b.y2) - max(a.y1, b.y1)
    if w <= 0.0 or h <= 0.0:
        return 0.0
    return w * h


def clipped_area(box: BBox, canvas_w: int, canvas_h: int) -> float:
    """Area of ``box`` restricted to [0, canvas_w] x [0, canvas_h]."""
    w = min(box.x2, float(canvas_w)) - max(box.x1, 0.0)
    h = min(box.y2, float(canvas_h)) - max(box.y1, 0.0)
    if w <= 0.0 or h <= 0.0:
        return 0.0
    return w * h


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union in [0, 1]; 0 when the union is empty."""
    inter = intersection_area(a, b)
    union = box_area(a) + box_area(b) - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def giou(a: BBox, b: BBox) -> float:
    """Generalized IoU in [-1, 1].

    iou(a, b) minus the fraction of the smallest enclosing box not covered
    by the union. Defined as 0 when the enclosing box is degenerate (both
    boxes are zero-area at the same point).
    """
    inter = intersection_area(a, b)
    union = box_area(a) + box_area(b) - inter
    hull_w = max(a.x2, b.x2) - min(a.x1, b.x1)
    hull_h = max(a.y2, b.y2) - min(a.y1, b.y1)
    hull = max(0.0, hull_w) * max(0.0, hull_h)
    if hull <= 0.0:
        return 0.0
    iou_val = inter / union if union > 0.0 else 0.0
    # The uncovered-hull penalty is mathematically non-negative; clamp the
    # float rounding so giou <= iou holds exactly.
    return iou_val - max(0.0, (hull - union) / hull)


def corners_to_center(box: BBox) -> CenterBox:
    """Convert a canonical corner box to (xc, yc, w, h) form."""
    return CenterBox(
        (box.x1 + box.x2) / 2.0,
        (box.y1 + box.y2) / 2.0,
        box.x2 - box.x1,
        box.y2 - box.y1,
    )


def center_to_corners(cbox: CenterBox) -> BBox:
    """Inverse of :func:`corners_to_center`.

    Exact (bit-for-bit) whenever midpoint and extent are representable,
    which holds for pixel-grid data (integer or half-integer coordinates);
    for arbitrary reals the round trip is correct to 1 ulp.
    """
    hw = cbox.w / 2.0
    hh = cbox.h / 2.0
    return BBox(cbox.xc - hw, cbox.yc - hh, cbox.xc + hw, cbox.yc + hh)


def contains(outer: BBox, inner: BBox) -> bool:
    """Closed containment: boundary touching counts as inside."""
    return (
        outer.x1 <= inner.x1
        and outer.y1 <= inner.y1
        and inner.x2 <= outer.x2
        and inner.y2 <= outer.y2
    )


def is_valid(element: Element, canvas_w: int, canvas_h: int) -> bool:
    """Whether an element's in-canvas area exceeds 0.1% of the canvas.

    Strictly greater-than: boundary-equal area is invalid. PAD elements are
    never valid.
    """
    if element.cls is ElementClass.PAD:
        return False
    threshold = VALIDITY_AREA_FRACTION * (canvas_w * canvas_h)
    return clipped_area(element.box, canvas_w, canvas_h) > threshold


def valid_elements(layout: Layout) -> tuple[Element, ...]:
    """Elements passing :func:`is_valid` on the layout's canvas."""
    return tuple(
        e
        for e in layout.elements
        if is_valid(e, layout.canvas_w, layout.canvas_h)
    )
