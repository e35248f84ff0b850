"""Annotation, raster, and sequence file IO plus dataset statistics.

Native annotation format (line-delimited JSON, ``.jsonl``)
----------------------------------------------------------
Line 1 is a header object::

    {"format": "poster-layouts", "version": 1}

Every following line is one layout record::

    {"canvas_id": "poster_001",        # required, non-empty string
     "canvas_w": 513, "canvas_h": 750, # required, positive integers
     "layout_id": "0",                 # optional; defaults to the record row
     "split": "train",                 # optional
     "elements": [                     # required, possibly empty
        {"class": "text", "box": [x1, y1, x2, y2]}, ...]}

Element classes are ``text``, ``logo``, ``underlay``; ``pad`` never appears
in annotations (length fitting alone produces it). Boxes are canonicalized
on load and element indices follow record order, so deterministic sorts are
reproducible from files alone.

Sequence files (written by the ``dsf`` command) use header format
``poster-sequences`` and add per record: ``order`` (source element index per
entry), ``strategy``, ``seed``, ``fitted_length``, and ``orphans``.

Tabular adapter
---------------
Published distributions of this kind of data often ship a CSV with one row
per layout holding literal lists of class ids and boxes. The adapter's
column names, class-id map (default 1=text, 2=logo, 3=underlay, 0 skipped),
and canvas size are configuration, not code; see :class:`TableFormat`.
"""

from __future__ import annotations

import ast
import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np
from PIL import Image, UnidentifiedImageError

from .geometry import canonicalize
from .model import BBox, Element, ElementClass, Layout
from .raster import LUMA_WEIGHTS, Raster
from .sequencing import DesignSequence

ANNOTATION_FORMAT = "poster-layouts"
SEQUENCE_FORMAT = "poster-sequences"
FORMAT_VERSION = 1

_INGEST_CLASSES = {
    "text": ElementClass.TEXT,
    "logo": ElementClass.LOGO,
    "underlay": ElementClass.UNDERLAY,
}

RASTER_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".webp")


class AnnotationError(ValueError):
    """A malformed annotation record, with file position attached."""

    def __init__(self, message: str, *, path=None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where = f"{self.path}:"
            where += f"{line}: " if line is not None else " "
        super().__init__(f"{where}{message}")


class RasterError(ValueError):
    """An unreadable or wrongly sized raster file."""


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotation file record before conversion to a Layout."""

    canvas_id: str
    canvas_w: int
    canvas_h: int
    elements: tuple[tuple[str, tuple[float, float, float, float]], ...]
    layout_id: str = ""
    split: str | None = None

    def to_layout(self) -> Layout:
        items = []
        for name, box in self.elements:
            items.append((_INGEST_CLASSES[name], canonicalize(BBox(*box))))
        return Layout.build(
            self.canvas_id,
            self.canvas_w,
            self.canvas_h,
            items,
            layout_id=self.layout_id,
        )


@dataclass(frozen=True)
class TableFormat:
    """Configuration for the tabular (CSV) adapter.

    ``class_map`` maps numeric class ids to class names; ids in
    ``ignore_ids`` are silently skipped (distributions commonly pad rows
    with zeros). Canvas size comes from ``width_col``/``height_col`` when
    set, else from the fixed ``canvas_w``/``canvas_h``.
    """

    canvas_w: int
    canvas_h: int
    class_map: Mapping[int, str] = field(
        default_factory=lambda: {1: "text", 2: "logo", 3: "underlay"}
    )
    ignore_ids: frozenset[int] = frozenset({0})
    id_col: str = "poster_path"
    classes_col: str = "cls_elem"
    boxes_col: str = "box_elem"
    split_col: str | None = None
    width_col: str | None = None
    height_col: str | None = None


def _require(condition: bool, message: str, path, line: int) -> None:
    if not condition:
        raise AnnotationError(message, path=path, line=line)


def _parse_box(raw, path, line) -> tuple[float, float, float, float]:
    _require(
        isinstance(raw, (list, tuple)) and len(raw) == 4,
        f"box must be a 4-element list, got {raw!r}",
        path,
        line,
    )
    coords = []
    for v in raw:
        _require(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            and math.isfinite(v),
            f"box coordinate {v!r} is not a finite number",
            path,
            line,
        )
        coords.append(float(v))
    return tuple(coords)


def _read_header(fh, path, expected_format: str) -> None:
    first = fh.readline()
    if not first.strip():
        raise AnnotationError("missing header line", path=path, line=1)
    try:
        header = json.loads(first)
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"bad header: {exc}", path=path, line=1)
    if not isinstance(header, dict) or header.get("format") != expected_format:
        raise AnnotationError(
            f"expected header format {expected_format!r}, got "
            f"{header.get('format') if isinstance(header, dict) else header!r}",
            path=path,
            line=1,
        )
    if header.get("version") != FORMAT_VERSION:
        raise AnnotationError(
            f"unsupported version {header.get('version')!r}", path=path, line=1
        )


def _record_from_obj(obj, path, line) -> AnnotationRecord:
    _require(isinstance(obj, dict), "record must be an object", path, line)
    canvas_id = obj.get("canvas_id")
    _require(
        isinstance(canvas_id, str) and canvas_id != "",
        f"canvas_id must be a non-empty string, got {canvas_id!r}",
        path,
        line,
    )
    dims = []
    for key in ("canvas_w", "canvas_h"):
        v = obj.get(key)
        _require(
            isinstance(v, int) and not isinstance(v, bool) and v > 0,
            f"{key} must be a positive integer, got {v!r}",
            path,
            line,
        )
        dims.append(v)
    raw_elements = obj.get("elements")
    _require(
        isinstance(raw_elements, list),
        f"elements must be a list, got {type(raw_elements).__name__}",
        path,
        line,
    )
    elements = []
    for el in raw_elements:
        _require(isinstance(el, dict), "element must be an object", path, line)
        name = el.get("class")
        _require(
            name in _INGEST_CLASSES,
            f"unknown element class {name!r} "
            f"(expected one of {sorted(_INGEST_CLASSES)})",
            path,
            line,
        )
        elements.append((name, _parse_box(el.get("box"), path, line)))
    layout_id = obj.get("layout_id", "")
    _require(
        isinstance(layout_id, str), "layout_id must be a string", path, line
    )
    split = obj.get("split")
    _require(
        split is None or isinstance(split, str),
        "split must be a string",
        path,
        line,
    )
    return AnnotationRecord(
        canvas_id=canvas_id,
        canvas_w=dims[0],
        canvas_h=dims[1],
        elements=tuple(elements),
        layout_id=layout_id or str(line - 2),
        split=split,
    )


def _iter_native_records(path):
    with open(path, "r", encoding="utf-8") as fh:
        _read_header(fh, path, ANNOTATION_FORMAT)
        for line_no, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            yield line_no, raw


def _parse_cell(raw: str, column: str, path, line):
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError) as exc:
        raise AnnotationError(
            f"column {column!r} is not a literal list: {exc}",
            path=path,
            line=line,
        )


def _tabular_record_from_row(
    row: dict, table: TableFormat, path, line: int
) -> AnnotationRecord:
    for col in (table.id_col, table.classes_col, table.boxes_col):
        _require(row.get(col) is not None, f"missing column {col!r}", path, line)
    class_ids = _parse_cell(row[table.classes_col], table.classes_col, path, line)
    boxes = _parse_cell(row[table.boxes_col], table.boxes_col, path, line)
    _require(
        isinstance(class_ids, (list, tuple)) and isinstance(boxes, (list, tuple)),
        "class and box cells must hold lists",
        path,
        line,
    )
    _require(
        len(class_ids) == len(boxes),
        f"{len(class_ids)} class ids but {len(boxes)} boxes",
        path,
        line,
    )
    elements = []
    for cid, box in zip(class_ids, boxes):
        _require(
            isinstance(cid, int) and not isinstance(cid, bool),
            f"class id {cid!r} is not an integer",
            path,
            line,
        )
        if cid in table.ignore_ids:
            continue
        name = table.class_map.get(cid)
        _require(
            name in _INGEST_CLASSES,
            f"unknown class id {cid} under map {dict(table.class_map)}",
            path,
            line,
        )
        elements.append((name, _parse_box(box, path, line)))
    if table.width_col is not None:
        w = int(_parse_cell(row[table.width_col], table.width_col, path, line))
    else:
        w = table.canvas_w
    if table.height_col is not None:
        h = int(_parse_cell(row[table.height_col], table.height_col, path, line))
    else:
        h = table.canvas_h
    split = row[table.split_col] if table.split_col else None
    return AnnotationRecord(
        canvas_id=str(row[table.id_col]),
        canvas_w=w,
        canvas_h=h,
        elements=tuple(elements),
        layout_id=str(line - 2),
        split=split,
    )


def _tabular_records(path, table: TableFormat):
    """Yield AnnotationRecord per row, or the AnnotationError for bad rows."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            try:
                yield _tabular_record_from_row(row, table, path, reader.line_num)
            except AnnotationError as exc:
                yield exc


def load_records(
    path,
    fmt: str = "native",
    *,
    table: TableFormat | None = None,
    on_error: str | Callable[[AnnotationError], None] = "raise",
) -> list[AnnotationRecord]:
    """Read annotation records; see module docstring for the formats.

    ``on_error="raise"`` aborts on the first malformed record; passing a
    callable instead delivers each :class:`AnnotationError` to it and skips
    the record.
    """
    if fmt not in ("native", "tabular"):
        raise ValueError(f"format must be 'native' or 'tabular', got {fmt!r}")
    if fmt == "tabular" and table is None:
        raise ValueError("tabular format requires a TableFormat")

    records: list[AnnotationRecord] = []

    def handle(exc: AnnotationError) -> None:
        if on_error == "raise":
            raise exc
        on_error(exc)

    if fmt == "native":
        for line_no, raw in _iter_native_records(path):
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                handle(AnnotationError(f"bad JSON: {exc}", path=path, line=line_no))
                continue
            try:
                records.append(_record_from_obj(obj, path, line_no))
            except AnnotationError as exc:
                handle(exc)
    else:
        for item in _tabular_records(path, table):
            if isinstance(item, AnnotationError):
                handle(item)
            else:
                records.append(item)
    return records


def load_annotations(
    path,
    fmt: str = "native",
    *,
    table: TableFormat | None = None,
    split: str | None = None,
    on_error: str | Callable[[AnnotationError], None] = "raise",
) -> list[Layout]:
    """Load layouts with canonical boxes and file-order element indices."""
    records = load_records(path, fmt, table=table, on_error=on_error)
    if split is not None:
        records = [r for r in records if r.split == split]
    return [r.to_layout() for r in records]


def _element_obj(e: Element) -> dict:
    return {"class": e.cls.value, "box": list(e.box.as_tuple())}


def save_annotations(path, layouts: Iterable[Layout], *, split: str | None = None) -> None:
    """Write layouts in the native format (lossless round trip)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps({"format": ANNOTATION_FORMAT, "version": FORMAT_VERSION})
            + "\n"
        )
        for layout in layouts:
            obj = {
                "canvas_id": layout.canvas_id,
                "canvas_w": layout.canvas_w,
                "canvas_h": layout.canvas_h,
                "layout_id": layout.layout_id,
                "elements": [_element_obj(e) for e in layout.elements],
            }
            if split is not None:
                obj["split"] = split
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def save_sequences(path, sequences: Iterable[DesignSequence]) -> None:
    """Write design sequences: annotation records plus ordering metadata."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps({"format": SEQUENCE_FORMAT, "version": FORMAT_VERSION})
            + "\n"
        )
        for seq in sequences:
            obj = {
                "canvas_id": seq.canvas_id,
                "canvas_w": seq.canvas_w,
                "canvas_h": seq.canvas_h,
                "layout_id": seq.layout_id,
                "elements": [_element_obj(e) for e in seq.entries],
                "order": [e.index for e in seq.entries],
                "strategy": seq.strategy,
                "seed": seq.seed,
                "fitted_length": seq.fitted_length,
                "orphans": list(seq.orphan_indices),
            }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def load_sequences(path) -> list[DesignSequence]:
    """Read a sequence file back into :class:`DesignSequence` objects."""
    sequences = []
    with open(path, "r", encoding="utf-8") as fh:
        _read_header(fh, path, SEQUENCE_FORMAT)
        for line_no, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise AnnotationError(
                    f"bad JSON: {exc}", path=path, line=line_no
                )
            _require(
                isinstance(obj, dict), "record must be an object", path, line_no
            )
            order = obj.get("order")
            raw_elements = obj.get("elements", [])
            _require(
                isinstance(order, list) and len(order) == len(raw_elements),
                "order must list one source index per element",
                path,
                line_no,
            )
            entries = []
            for idx, el in zip(order, raw_elements):
                _require(
                    isinstance(el, dict) and isinstance(idx, int),
                    "malformed sequence entry",
                    path,
                    line_no,
                )
                name = el.get("class")
                cls = (
                    ElementClass.PAD
                    if name == "pad"
                    else _INGEST_CLASSES.get(name)
                )
                _require(
                    cls is not None,
                    f"unknown element class {name!r}",
                    path,
                    line_no,
                )
                box = canonicalize(BBox(*_parse_box(el.get("box"), path, line_no)))
                entries.append(Element(cls, box, idx))
            sequences.append(
                DesignSequence(
                    canvas_id=obj["canvas_id"],
                    canvas_w=obj["canvas_w"],
                    canvas_h=obj["canvas_h"],
                    entries=tuple(entries),
                    strategy=obj.get("strategy", "dsf"),
                    seed=obj.get("seed"),
                    fitted_length=obj.get("fitted_length"),
                    orphan_indices=tuple(obj.get("orphans", ())),
                    layout_id=obj.get("layout_id", ""),
                )
            )
    return sequences


def load_raster(path, expected_size: tuple[int, int] | None = None) -> Raster:
    """Load an 8-bit grayscale or color image as a [0, 1] raster.

    Grayscale values map to v/255 exactly; color images reduce to luminance
    with weights 0.299/0.587/0.114 before scaling. ``expected_size`` is
    (width, height); a mismatch raises :class:`RasterError`.
    """
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode == "L":
                arr = np.asarray(img, dtype=np.float64) / 255.0
            else:
                rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
                arr = rgb @ np.array(LUMA_WEIGHTS) / 255.0
    except (OSError, UnidentifiedImageError) as exc:
        raise RasterError(f"cannot read raster {path}: {exc}")
    if expected_size is not None:
        w, h = expected_size
        if arr.shape != (h, w):
            raise RasterError(
                f"raster {path} is {arr.shape[1]}x{arr.shape[0]}, "
                f"expected {w}x{h}"
            )
    # Luminance weights sum to 1 only up to float rounding; clamp the spill.
    return Raster(np.clip(arr, 0.0, 1.0))


def find_raster(directory, canvas_id: str) -> Path | None:
    """Locate the raster for a canvas id inside a directory.

    Tries the id verbatim, then its basename, then the basename stem with
    common raster extensions.
    """
    directory = Path(directory)
    name = Path(canvas_id).name
    stem = Path(canvas_id).stem
    candidates = [directory / canvas_id, directory / name]
    candidates += [directory / f"{stem}{ext}" for ext in RASTER_EXTENSIONS]
    for cand in candidates:
        if cand.is_file():
            return cand
    return None


@dataclass(frozen=True)
class DatasetStats:
    """Corpus statistics: pair/canvas counts and the element-count
    histogram feeding the maximum sequence length."""

    n_pairs: int
    n_canvases: int
    histogram: Mapping[int, int]
    max_elements: int
    per_class: Mapping[str, int]

    @property
    def n_complex(self) -> int:
        """Layouts with more than 10 elements."""
        return sum(c for n, c in self.histogram.items() if n > 10)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "n_pairs": self.n_pairs,
            "n_canvases": self.n_canvases,
            "max_elements": self.max_elements,
            "n_complex": self.n_complex,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "per_class": dict(sorted(self.per_class.items())),
        }


def dataset_stats(layouts: Iterable[Layout]) -> DatasetStats:
    """Count pairs, canvases, per-class elements, and layout sizes."""
    layouts = list(layouts)
    histogram = Counter(len(l.elements) for l in layouts)
    per_class = Counter(
        e.cls.value for l in layouts for e in l.elements
    )
    return DatasetStats(
        n_pairs=len(layouts),
        n_canvases=len({l.canvas_id for l in layouts}),
        histogram=dict(sorted(histogram.items())),
        max_elements=max(histogram) if histogram else 0,
        per_class=dict(sorted(per_class.items())),
    )
