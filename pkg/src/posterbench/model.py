"""Domain types shared by every other module.

A layout is a variable-length set of classed, axis-aligned boxes tied to a
canvas. Coordinates are stored in pixels, exactly as annotated; they are
real-valued, may be degenerate (zero width or height), and may extend beyond
the canvas. Whether an element counts as "valid" is a metric concern, not a
type invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class ElementClass(Enum):
    """Layout element classes.

    PAD is a filler emitted by fixed-length fitting only; ingestion never
    produces it.
    """

    TEXT = "text"
    LOGO = "logo"
    UNDERLAY = "underlay"
    PAD = "pad"


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in corner form (x1, y1, x2, y2), pixel units.

    Construction requires finite coordinates but not canonical order; use
    :func:`posterbench.geometry.canonicalize` to normalize x1 <= x2 and
    y1 <= y2.
    """

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        for name in ("x1", "y1", "x2", "y2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate {name}={v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def is_canonical(self) -> bool:
        return self.x1 <= self.x2 and self.y1 <= self.y2

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


@dataclass(frozen=True)
class CenterBox:
    """Box in center form (xc, yc, w, h); w and h are non-negative."""

    xc: float
    yc: float
    w: float
    h: float

    def __post_init__(self) -> None:
        for name in ("xc", "yc", "w", "h"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate {name}={v!r}")
            object.__setattr__(self, name, float(v))
        if self.w < 0 or self.h < 0:
            raise ValueError(f"negative extent w={self.w}, h={self.h}")


@dataclass(frozen=True)
class Element:
    """One layout item: class, box, and its original annotation position.

    ``index`` is the stable tie-break key used by every deterministic sort.
    """

    cls: ElementClass
    box: BBox
    index: int


@dataclass(frozen=True)
class Layout:
    """A set of elements placed over one canvas.

    Element indices must be unique and non-negative. Ingestion assigns them
    in file order (0..n-1); derived artifacts such as truncated sequences may
    carry a sparse subset.
    """

    canvas_id: str
    canvas_w: int
    canvas_h: int
    elements: tuple[Element, ...]
    layout_id: str = ""

    def __post_init__(self) -> None:
        if self.canvas_w <= 0 or self.canvas_h <= 0:
            raise ValueError(
                f"canvas dimensions must be positive, got "
                f"{self.canvas_w}x{self.canvas_h}"
            )
        object.__setattr__(self, "elements", tuple(self.elements))
        seen: set[int] = set()
        for e in self.elements:
            if e.index < 0:
                raise ValueError(f"negative element index {e.index}")
            if e.index in seen:
                raise ValueError(f"duplicate element index {e.index}")
            seen.add(e.index)

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def build(
        cls,
        canvas_id: str,
        canvas_w: int,
        canvas_h: int,
        items: Iterable[tuple[ElementClass, BBox]],
        layout_id: str = "",
    ) -> "Layout":
        """Assemble a layout, assigning element indices 0..n-1 in order."""
        elements = tuple(
            Element(c, b, i) for i, (c, b) in enumerate(items)
        )
        return cls(canvas_id, canvas_w, canvas_h, elements, layout_id)
