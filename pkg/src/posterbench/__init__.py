"""posterbench: benchmark toolkit for content-aware poster layouts.

Provides exact box geometry, designer-imitating element ordering, eight
graphic and content-aware layout metrics, dataset ingestion, deterministic
baseline generators, wireframe rendering, and a reproducible CLI.
"""

from .generators import GenSpec, random_layout, saliency_grid_layout
from .geometry import (
    VALIDITY_AREA_FRACTION,
    box_area,
    canonicalize,
    canonicalize_layout,
    center_to_corners,
    clipped_area,
    contains,
    corners_to_center,
    giou,
    intersection_area,
    iou,
    is_valid,
    valid_elements,
)
from .io import (
    AnnotationError,
    AnnotationRecord,
    DatasetStats,
    RasterError,
    TableFormat,
    dataset_stats,
    find_raster,
    load_annotations,
    load_raster,
    load_records,
    load_sequences,
    save_annotations,
    save_sequences,
)
from .metrics import (
    CONTENT_METRICS,
    GRAPHIC_METRICS,
    METRIC_NAMES,
    EvalItem,
    LayoutMetrics,
    MetricReport,
    aggregate,
    compute_ae,
    evaluate,
    evaluate_layout,
    metric_alignment,
    metric_occlusion,
    metric_overlay,
    metric_readability,
    metric_underlay,
    metric_utility,
    metric_validity,
)
from .model import BBox, CenterBox, Element, ElementClass, Layout
from .raster import Raster, composite_saliency, gradient_magnitude, rasterize_coverage
from .render import CLASS_COLORS, OVERLAY_ALPHA, render_layout
from .rng import SeededRng
from .sequencing import (
    DesignSequence,
    DesignSequencer,
    UnderlayGroups,
    fit_length,
    form_design_sequence,
    group_by_underlay,
    max_sequence_length,
    order_geometric,
    order_random,
)
from .validation import check_fit_length, check_layout

__version__ = "0.1.0"

__all__ = [
    "AnnotationError",
    "AnnotationRecord",
    "BBox",
    "CLASS_COLORS",
    "CONTENT_METRICS",
    "CenterBox",
    "DatasetStats",
    "DesignSequence",
    "DesignSequencer",
    "Element",
    "ElementClass",
    "EvalItem",
    "GRAPHIC_METRICS",
    "GenSpec",
    "Layout",
    "LayoutMetrics",
    "METRIC_NAMES",
    "MetricReport",
    "OVERLAY_ALPHA",
    "Raster",
    "RasterError",
    "SeededRng",
    "TableFormat",
    "UnderlayGroups",
    "VALIDITY_AREA_FRACTION",
    "aggregate",
    "box_area",
    "canonicalize",
    "canonicalize_layout",
    "center_to_corners",
    "check_fit_length",
    "check_layout",
    "clipped_area",
    "composite_saliency",
    "compute_ae",
    "contains",
    "corners_to_center",
    "dataset_stats",
    "evaluate",
    "evaluate_layout",
    "find_raster",
    "fit_length",
    "form_design_sequence",
    "giou",
    "gradient_magnitude",
    "group_by_underlay",
    "intersection_area",
    "iou",
    "is_valid",
    "load_annotations",
    "load_raster",
    "load_records",
    "load_sequences",
    "max_sequence_length",
    "metric_alignment",
    "metric_occlusion",
    "metric_overlay",
    "metric_readability",
    "metric_underlay",
    "metric_utility",
    "metric_validity",
    "order_geometric",
    "order_random",
    "random_layout",
    "rasterize_coverage",
    "render_layout",
    "saliency_grid_layout",
    "save_annotations",
    "save_sequences",
    "valid_elements",
]
