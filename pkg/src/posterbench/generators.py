"""Deterministic baseline layout generators.

Neither generator learns anything; they exist so the evaluation pipeline
has subjects to score without any trained model. Both are pure functions of
their spec (the seed lives inside it) and of the saliency map, and both emit
only elements fully inside the canvas, so their validity score is always 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .geometry import VALIDITY_AREA_FRACTION
from .model import BBox, ElementClass, Layout
from .raster import Raster
from .rng import SeededRng

DEFAULT_GRID = (8, 8)

# Underlays inflate their anchor text by this fraction of the shorter canvas
# side (clamped to the canvas).
_UNDERLAY_MARGIN_FRACTION = 0.02


@dataclass(frozen=True)
class GenSpec:
    """Generation parameters: canvas size, per-class count ranges, element
    size ranges as canvas fractions, and the seed.

    Count ranges are closed intervals. Size fractions must fall in (0, 1]
    and their minimum product must exceed the validity threshold so every
    generated element is valid. Underlays wrap a text element, so requesting
    underlays requires at least one guaranteed text.
    """

    canvas_w: int
    canvas_h: int
    n_text: tuple[int, int] = (1, 4)
    n_logo: tuple[int, int] = (0, 2)
    n_underlay: tuple[int, int] = (0, 1)
    width_frac: tuple[float, float] = (0.1, 0.5)
    height_frac: tuple[float, float] = (0.05, 0.3)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.canvas_w <= 0 or self.canvas_h <= 0:
            raise ValueError(
                f"canvas must be positive, got {self.canvas_w}x{self.canvas_h}"
            )
        for name in ("n_text", "n_logo", "n_underlay"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise ValueError(f"{name} range [{lo}, {hi}] is empty")
        for name in ("width_frac", "height_frac"):
            lo, hi = getattr(self, name)
            if not (0.0 < lo <= hi <= 1.0):
                raise ValueError(
                    f"{name} range ({lo}, {hi}) must lie in (0, 1]"
                )
        if self.width_frac[0] * self.height_frac[0] <= VALIDITY_AREA_FRACTION:
            raise ValueError(
                "minimum element area fraction "
                f"{self.width_frac[0] * self.height_frac[0]} does not exceed "
                f"the validity threshold {VALIDITY_AREA_FRACTION}"
            )
        if self.n_underlay[1] > 0 and self.n_text[0] < 1:
            raise ValueError(
                "underlays wrap a text element; n_text minimum must be >= 1 "
                "when underlays are requested"
            )

    @classmethod
    def from_file(cls, path) -> "GenSpec":
        """Read a spec from a small JSON config file."""
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict):
            raise ValueError(f"{path}: spec file must hold a JSON object")
        kwargs = dict(obj)
        for key in ("n_text", "n_logo", "n_underlay", "width_frac", "height_frac"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ValueError(f"{path}: {exc}")


def _wrap_box(box: BBox, margin: float, w: int, h: int) -> BBox:
    return BBox(
        max(0.0, box.x1 - margin),
        max(0.0, box.y1 - margin),
        min(float(w), box.x2 + margin),
        min(float(h), box.y2 + margin),
    )


def random_layout(spec: GenSpec, canvas_id: str = "random") -> Layout:
    """Uniformly random layout, every element fully inside the canvas.

    Counts and sizes draw uniformly from the spec ranges; underlays enclose
    a randomly chosen text so underlay metrics are exercised. Emission order
    (and element indices): texts, logos, underlays.
    """
    rng = SeededRng(spec.seed)
    n_text = rng.randint(*spec.n_text)
    n_logo = rng.randint(*spec.n_logo)
    n_under = rng.randint(*spec.n_underlay)
    w, h = spec.canvas_w, spec.canvas_h

    def draw_box() -> BBox:
        bw = rng.uniform(*spec.width_frac) * w
        bh = rng.uniform(*spec.height_frac) * h
        x1 = rng.uniform(0.0, w - bw)
        y1 = rng.uniform(0.0, h - bh)
        return BBox(x1, y1, x1 + bw, y1 + bh)

    items: list[tuple[ElementClass, BBox]] = []
    texts = [draw_box() for _ in range(n_text)]
    items += [(ElementClass.TEXT, b) for b in texts]
    items += [(ElementClass.LOGO, draw_box()) for _ in range(n_logo)]
    margin = _UNDERLAY_MARGIN_FRACTION * min(w, h)
    for _ in range(n_under):
        anchor = texts[rng.below(len(texts))]
        items.append((ElementClass.UNDERLAY, _wrap_box(anchor, margin, w, h)))
    return Layout.build(canvas_id, w, h, items)


def _cell_bounds(n: int, parts: int) -> list[tuple[int, int]]:
    return [(i * n // parts, (i + 1) * n // parts) for i in range(parts)]


def saliency_grid_layout(
    saliency: Raster,
    spec: GenSpec,
    canvas_id: str = "grid",
    grid: tuple[int, int] = DEFAULT_GRID,
) -> Layout:
    """Greedy grid baseline: fill the least salient cells first.

    The canvas splits into ``grid`` (cols, rows) cells; texts and logos
    occupy whole cells picked by ascending mean saliency, ties broken in
    row-major order. Underlays wrap a chosen text cell and do not consume
    cells. Requesting more cell-consuming elements than cells is an error.
    """
    if saliency.width != spec.canvas_w or saliency.height != spec.canvas_h:
        raise ValueError(
            f"saliency is {saliency.width}x{saliency.height}, spec canvas is "
            f"{spec.canvas_w}x{spec.canvas_h}"
        )
    gx, gy = grid
    if gx < 1 or gy < 1:
        raise ValueError(f"grid must be at least 1x1, got {grid}")
    if gx > spec.canvas_w or gy > spec.canvas_h:
        raise ValueError(
            f"grid {gx}x{gy} is finer than the {spec.canvas_w}x"
            f"{spec.canvas_h} canvas"
        )
    rng = SeededRng(spec.seed)
    n_text = rng.randint(*spec.n_text)
    n_logo = rng.randint(*spec.n_logo)
    n_under = rng.randint(*spec.n_underlay)
    if n_text + n_logo > gx * gy:
        raise ValueError(
            f"{n_text + n_logo} elements requested but the {gx}x{gy} grid "
            f"has only {gx * gy} cells"
        )

    cols = _cell_bounds(spec.canvas_w, gx)
    rows = _cell_bounds(spec.canvas_h, gy)
    cells = []
    for r, (y0, y1) in enumerate(rows):
        for c, (x0, x1) in enumerate(cols):
            mean = float(saliency.values[y0:y1, x0:x1].mean())
            cells.append((mean, r * gx + c, BBox(x0, y0, x1, y1)))
    cells.sort(key=lambda t: (t[0], t[1]))

    items: list[tuple[ElementClass, BBox]] = []
    text_boxes = []
    for i in range(n_text + n_logo):
        box = cells[i][2]
        if i < n_text:
            text_boxes.append(box)
            items.append((ElementClass.TEXT, box))
        else:
            items.append((ElementClass.LOGO, box))
    margin = _UNDERLAY_MARGIN_FRACTION * min(spec.canvas_w, spec.canvas_h)
    for _ in range(n_under):
        anchor = text_boxes[rng.below(len(text_boxes))]
        items.append(
            (
                ElementClass.UNDERLAY,
                _wrap_box(anchor, margin, spec.canvas_w, spec.canvas_h),
            )
        )
    return Layout.build(canvas_id, spec.canvas_w, spec.canvas_h, items)


def with_seed(spec: GenSpec, seed: int) -> GenSpec:
    """Copy of the spec with a different seed."""
    return replace(spec, seed=seed)
