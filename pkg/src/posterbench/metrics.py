"""The eight layout quality metrics and their deterministic aggregation.

Graphic metrics need only the layout geometry; content-aware metrics pair
the layout with rasters of its canvas:

* ``val``   validity: share of elements whose in-canvas area exceeds 0.1%
            of the canvas. Higher is better. Every other metric considers
            only valid elements.
* ``ove``   overlay: mean IoU over all unordered pairs of valid
            non-underlay elements. Lower is better.
* ``ali``   non-alignment: for each valid element, the minimum normalized
            distance to any other element over six axes (left edge,
            x-center, right edge, top edge, y-center, bottom edge), then
            the mean over elements. Coordinates are clipped to the canvas
            and divided by its width (x axes) or height (y axes), keeping
            the value in [0, 1]. Lower is better.
* ``und_l`` loose underlay effectiveness: per valid underlay, the largest
            intersection_area(u, inst)/area(inst) over valid non-underlay
            elements; averaged. Higher is better.
* ``und_s`` strict underlay effectiveness: 1 when some valid non-underlay
            element lies completely inside the underlay (closed
            containment), else 0; averaged. Never exceeds ``und_l``.
* ``uti``   utilization of non-salient space: with S' = 1 - S, the sum of
            S' over pixels covered by valid elements divided by the sum of
            S' over the whole canvas. Higher is better.
* ``occ``   occlusion: mean saliency over covered pixels. Lower is better.
* ``rea``   unreadability: mean normalized luminance-gradient magnitude
            over pixels covered by valid texts but no valid underlay.
            Lower is better.

Per-layout values that are undefined (an empty layout for ``val``, fewer
than two participants for ``ove``, no valid underlays for ``und``) are
excluded from aggregation rather than zero-filled, and the exclusion is
counted in the report. Aggregation folds layouts in a canonical order, so
reports are independent of input order and of any parallel scheduling.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .geometry import (
    box_area,
    contains,
    intersection_area,
    iou,
    is_valid,
    valid_elements,
)
from .model import Element, ElementClass, Layout
from .raster import Raster, check_raster_dims, gradient_magnitude, rasterize_coverage
from .sequencing import group_by_underlay
from .validation import check_layout

METRIC_NAMES = ("val", "ove", "ali", "und_l", "und_s", "uti", "occ", "rea")

#: Metrics computable from geometry alone.
GRAPHIC_METRICS = ("val", "ove", "ali", "und_l", "und_s")
#: Metrics that additionally need saliency ("uti", "occ") or the canvas
#: image ("rea").
CONTENT_METRICS = ("uti", "occ", "rea")

_RANGES = {name: (0.0, 1.0) for name in METRIC_NAMES}


def metric_validity(layout: Layout) -> float | None:
    """Share of valid elements; None when the layout has no real elements.

    PAD entries are excluded before counting.
    """
    check_layout(layout)
    real = [e for e in layout.elements if e.cls is not ElementClass.PAD]
    if not real:
        return None
    n_valid = sum(
        1 for e in real if is_valid(e, layout.canvas_w, layout.canvas_h)
    )
    return n_valid / len(real)


def metric_overlay(layout: Layout) -> float | None:
    """Mean pairwise IoU of valid non-underlay elements.

    None (excluded) when fewer than two elements participate.
    """
    check_layout(layout)
    parts = [
        e
        for e in valid_elements(layout)
        if e.cls in (ElementClass.TEXT, ElementClass.LOGO)
    ]
    if len(parts) < 2:
        return None
    total = math.fsum(
        iou(parts[i].box, parts[j].box)
        for i in range(len(parts))
        for j in range(i + 1, len(parts))
    )
    n_pairs = len(parts) * (len(parts) - 1) // 2
    return total / n_pairs


def _alignment_axes(e: Element, w: int, h: int) -> tuple[float, ...]:
    # Clip to the canvas before normalizing so every axis lands in [0, 1].
    x1 = min(max(e.box.x1, 0.0), float(w)) / w
    x2 = min(max(e.box.x2, 0.0), float(w)) / w
    y1 = min(max(e.box.y1, 0.0), float(h)) / h
    y2 = min(max(e.box.y2, 0.0), float(h)) / h
    return (x1, (x1 + x2) / 2.0, x2, y1, (y1 + y2) / 2.0, y2)


def metric_alignment(layout: Layout) -> float:
    """Mean per-element minimum axis distance; 0 with fewer than two
    participants."""
    check_layout(layout)
    parts = valid_elements(layout)
    if len(parts) < 2:
        return 0.0
    axes = [
        _alignment_axes(e, layout.canvas_w, layout.canvas_h) for e in parts
    ]
    dists = []
    for i in range(len(parts)):
        best = math.inf
        for j in range(len(parts)):
            if j == i:
                continue
            for a in range(6):
                d = abs(axes[i][a] - axes[j][a])
                if d < best:
                    best = d
        dists.append(best)
    return math.fsum(dists) / len(dists)


def metric_underlay(layout: Layout) -> tuple[float | None, float | None]:
    """Loose and strict underlay effectiveness.

    Returns (None, None) when the layout has no valid underlays.
    """
    check_layout(layout)
    valid = valid_elements(layout)
    unders = [e for e in valid if e.cls is ElementClass.UNDERLAY]
    others = [e for e in valid if e.cls is not ElementClass.UNDERLAY]
    if not unders:
        return None, None
    loose_scores = []
    strict_scores = []
    for u in unders:
        loose = 0.0
        strict = 0.0
        for o in others:
            area = box_area(o.box)
            if area > 0.0:
                loose = max(loose, intersection_area(u.box, o.box) / area)
            if contains(u.box, o.box):
                strict = 1.0
        loose_scores.append(loose)
        strict_scores.append(strict)
    return (
        math.fsum(loose_scores) / len(unders),
        math.fsum(strict_scores) / len(unders),
    )


def _utility(negative, mask) -> float:
    denom = float(negative.sum())
    if denom == 0.0:
        return 0.0
    return float(negative[mask].sum()) / denom


def _occlusion(saliency_values, mask) -> float:
    covered = int(mask.sum())
    if covered == 0:
        return 0.0
    return float(saliency_values[mask].sum()) / covered


def _text_only_region(layout: Layout):
    text_mask = rasterize_coverage(layout, classes=(ElementClass.TEXT,))
    under_mask = rasterize_coverage(layout, classes=(ElementClass.UNDERLAY,))
    return text_mask & ~under_mask


def _readability(canvas_values, region) -> float:
    count = int(region.sum())
    if count == 0:
        return 0.0
    return float(gradient_magnitude(canvas_values)[region].sum()) / count


def metric_utility(layout: Layout, saliency: Raster) -> float:
    """Utilization of non-salient space by valid elements."""
    check_layout(layout)
    check_raster_dims(saliency, layout.canvas_w, layout.canvas_h, "saliency")
    return _utility(1.0 - saliency.values, rasterize_coverage(layout))


def metric_occlusion(layout: Layout, saliency: Raster) -> float:
    """Mean saliency under the valid elements; 0 with no coverage."""
    check_layout(layout)
    check_raster_dims(saliency, layout.canvas_w, layout.canvas_h, "saliency")
    return _occlusion(saliency.values, rasterize_coverage(layout))


def metric_readability(layout: Layout, canvas: Raster) -> float:
    """Mean gradient magnitude where texts sit directly on the canvas.

    The region is the coverage of valid texts minus the coverage of any
    valid underlay; 0 when that region is empty.
    """
    check_layout(layout)
    check_raster_dims(canvas, layout.canvas_w, layout.canvas_h, "canvas")
    return _readability(canvas.values, _text_only_region(layout))


@dataclass(frozen=True)
class LayoutMetrics:
    """Per-layout metric values; None marks a metric excluded for this
    layout. ``flags`` carry diagnostics such as degenerate denominators."""

    canvas_id: str
    layout_id: str
    n_elements: int
    val: float | None = None
    ove: float | None = None
    ali: float | None = None
    und_l: float | None = None
    und_s: float | None = None
    uti: float | None = None
    occ: float | None = None
    rea: float | None = None
    flags: tuple[str, ...] = ()

    def value(self, name: str) -> float | None:
        if name not in METRIC_NAMES:
            raise KeyError(name)
        return getattr(self, name)


@dataclass(frozen=True)
class EvalItem:
    """One evaluation subject: a layout plus its optional rasters."""

    layout: Layout
    saliency: Raster | None = None
    canvas: Raster | None = None


def _check_metric_names(metrics) -> tuple[str, ...]:
    if metrics is None:
        return METRIC_NAMES
    wanted = tuple(metrics)
    for m in wanted:
        if m not in METRIC_NAMES:
            raise ValueError(
                f"unknown metric {m!r}; choose from {METRIC_NAMES}"
            )
    return wanted


def evaluate_layout(
    layout: Layout,
    saliency: Raster | None = None,
    canvas: Raster | None = None,
    metrics: Iterable[str] | None = None,
) -> LayoutMetrics:
    """Compute the requested metrics for one layout.

    Content metrics whose raster is missing come back as None with a
    ``missing-saliency`` / ``missing-canvas`` flag; a raster with wrong
    dimensions raises ValueError.
    """
    wanted = set(_check_metric_names(metrics))
    values: dict[str, float | None] = {}
    flags: list[str] = []

    real = tuple(e for e in layout.elements if e.cls is not ElementClass.PAD)
    if len(real) != len(layout.elements):
        layout_no_pads = replace(layout, elements=real)
    else:
        layout_no_pads = layout
    if group_by_underlay(layout_no_pads).orphans:
        flags.append("orphan-underlay")

    if "val" in wanted:
        values["val"] = metric_validity(layout)
        if values["val"] is None:
            flags.append("empty-layout")
    if "ove" in wanted:
        values["ove"] = metric_overlay(layout)
    if "ali" in wanted:
        values["ali"] = metric_alignment(layout)
    if "und_l" in wanted or "und_s" in wanted:
        und_l, und_s = metric_underlay(layout)
        if "und_l" in wanted:
            values["und_l"] = und_l
        if "und_s" in wanted:
            values["und_s"] = und_s
        if und_l is None:
            flags.append("no-underlays")

    if "uti" in wanted or "occ" in wanted:
        if saliency is None:
            flags.append("missing-saliency")
        else:
            check_raster_dims(
                saliency, layout.canvas_w, layout.canvas_h, "saliency"
            )
            mask = rasterize_coverage(layout)
            if "uti" in wanted:
                negative = 1.0 - saliency.values
                values["uti"] = _utility(negative, mask)
                if float(negative.sum()) == 0.0:
                    flags.append("degenerate-saliency")
            if "occ" in wanted:
                values["occ"] = _occlusion(saliency.values, mask)
                if not mask.any():
                    flags.append("empty-coverage")
    if "rea" in wanted:
        if canvas is None:
            flags.append("missing-canvas")
        else:
            check_raster_dims(
                canvas, layout.canvas_w, layout.canvas_h, "canvas"
            )
            region = _text_only_region(layout)
            values["rea"] = _readability(canvas.values, region)
            if not region.any():
                flags.append("empty-text-region")

    return LayoutMetrics(
        canvas_id=layout.canvas_id,
        layout_id=layout.layout_id,
        n_elements=len(layout.elements),
        flags=tuple(flags),
        **values,
    )


@dataclass(frozen=True)
class MetricReport:
    """Aggregate of per-layout metrics.

    Each metric holds the mean over the layouts where it was defined, or
    None when no layout contributed. Constructing a report validates the
    documented ranges and that strict underlay effectiveness never exceeds
    the loose one.
    """

    val: float | None
    ove: float | None
    ali: float | None
    und_l: float | None
    und_s: float | None
    uti: float | None
    occ: float | None
    rea: float | None
    n_layouts: int = 0
    evaluated: Mapping[str, int] = field(default_factory=dict)
    excluded: Mapping[str, int] = field(default_factory=dict)
    flag_counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in METRIC_NAMES:
            v = getattr(self, name)
            if v is None:
                continue
            lo, hi = _RANGES[name]
            if not (lo <= v <= hi):
                raise ValueError(f"{name}={v} outside [{lo}, {hi}]")
        if self.und_l is not None and self.und_s is not None:
            if self.und_s > self.und_l:
                raise ValueError(
                    f"strict underlay effectiveness {self.und_s} exceeds "
                    f"loose {self.und_l}"
                )

    def value(self, name: str) -> float | None:
        if name not in METRIC_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "n_layouts": self.n_layouts,
            "metrics": {m: getattr(self, m) for m in METRIC_NAMES},
            "evaluated": dict(self.evaluated),
            "excluded": dict(self.excluded),
            "flags": dict(self.flag_counts),
        }


def _canonical_key(r: LayoutMetrics):
    metric_part = tuple(
        -2.0 if r.value(m) is None else r.value(m) for m in METRIC_NAMES
    )
    return (r.canvas_id, r.layout_id, r.n_elements, metric_part, r.flags)


def aggregate(results: Iterable[LayoutMetrics]) -> MetricReport:
    """Fold per-layout results into a report.

    Results are sorted by a canonical content key first, so the outcome is
    bit-identical for any input permutation, and means use exact summation.
    """
    ordered = sorted(results, key=_canonical_key)
    means: dict[str, float | None] = {}
    evaluated: dict[str, int] = {}
    excluded: dict[str, int] = {}
    for m in METRIC_NAMES:
        vals = [r.value(m) for r in ordered if r.value(m) is not None]
        evaluated[m] = len(vals)
        excluded[m] = len(ordered) - len(vals)
        means[m] = math.fsum(vals) / len(vals) if vals else None
    flag_counts = Counter()
    for r in ordered:
        flag_counts.update(r.flags)
    return MetricReport(
        n_layouts=len(ordered),
        evaluated=evaluated,
        excluded=excluded,
        flag_counts=dict(sorted(flag_counts.items())),
        **means,
    )


def evaluate(
    items: Iterable[EvalItem | Layout],
    metrics: Iterable[str] | None = None,
) -> MetricReport:
    """Evaluate a corpus and aggregate. Bare layouts are accepted for
    graphic-only runs."""
    results = []
    for item in items:
        if isinstance(item, Layout):
            item = EvalItem(item)
        results.append(
            evaluate_layout(item.layout, item.saliency, item.canvas, metrics)
        )
    return aggregate(results)


def compute_ae(report_a: MetricReport, report_b: MetricReport) -> float:
    """Total absolute metric difference between two reports.

    Both reports must carry all eight metrics; the result is symmetric,
    non-negative, and zero exactly when the reports agree everywhere.
    """
    diffs = []
    for m in METRIC_NAMES:
        a, b = report_a.value(m), report_b.value(m)
        if a is None or b is None:
            raise ValueError(f"metric {m!r} missing from a report")
        diffs.append(abs(b - a))
    return math.fsum(diffs)
