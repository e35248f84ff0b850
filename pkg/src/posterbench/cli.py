"""Command-line interface.

Subcommands: ``eval`` (score layouts), ``dsf`` (write ordered sequences),
``ablation`` (compare sequence lengths per ordering strategy), ``stats``
(dataset statistics), ``render`` (wireframe images), and ``generate``
(baseline layouts).

Every command is reproducible: identical inputs, flags, and seeds produce
byte-identical outputs, regardless of ``--jobs``. Exit codes: 0 on success,
2 for input problems (unreadable or malformed files, bad flag values), 3
for internal errors. The ``POSTERBENCH_DATA_ROOT`` environment variable
supplies default locations: ``annotations.jsonl``, ``canvases/``,
``saliency_1/``, ``saliency_2/`` beneath it.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from PIL import Image

from .generators import GenSpec, random_layout, saliency_grid_layout, with_seed
from .io import (
    AnnotationError,
    RasterError,
    dataset_stats,
    find_raster,
    load_annotations,
    load_raster,
    save_annotations,
    save_sequences,
)
from .metrics import (
    METRIC_NAMES,
    LayoutMetrics,
    MetricReport,
    aggregate,
    compute_ae,
    evaluate_layout,
)
from .model import Layout
from .raster import composite_saliency
from .render import render_layout
from .sequencing import DesignSequencer, max_sequence_length
from .validation import check_fit_length

ENV_ROOT = "POSTERBENCH_DATA_ROOT"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3

# Parallelism never affects output bytes, so defaulting to all cores is safe.
DEFAULT_JOBS = os.cpu_count() or 1


def _root_default(subpath: str) -> str | None:
    root = os.environ.get(ENV_ROOT)
    return str(Path(root) / subpath) if root else None


def _saliency_dirs(args) -> list[str]:
    if args.saliency_dirs is not None:
        dirs = list(args.saliency_dirs)
    else:
        dirs = [
            d
            for d in (_root_default("saliency_1"), _root_default("saliency_2"))
            if d and Path(d).is_dir()
        ]
    if len(dirs) > 2:
        raise ValueError(
            f"--saliency-dirs takes at most two directories, got {len(dirs)}"
        )
    return dirs


def _require_annotations(args) -> str:
    if args.annotations:
        return args.annotations
    fallback = _root_default("annotations.jsonl")
    if fallback and Path(fallback).exists():
        return fallback
    raise ValueError(
        "no annotations file: pass --annotations or set "
        f"{ENV_ROOT} with annotations.jsonl under it"
    )


def _parse_metrics(raw: str | None) -> tuple[str, ...]:
    if not raw:
        return METRIC_NAMES
    names = tuple(m.strip() for m in raw.split(",") if m.strip())
    for m in names:
        if m not in METRIC_NAMES:
            raise ValueError(
                f"unknown metric {m!r}; choose from {','.join(METRIC_NAMES)}"
            )
    return names


def _parse_length(raw: str | None):
    if raw is None:
        return None
    if raw == "max":
        return "max"
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"--length must be 'max' or a positive integer, got {raw!r}")
    return check_fit_length(value)


def _load_layouts(args, errors: list[str]) -> list[Layout]:
    path = _require_annotations(args)
    fmt = getattr(args, "annotations_format", "native")
    table = None
    if fmt == "tabular":
        size = getattr(args, "table_canvas", None)
        if not size:
            raise ValueError("tabular annotations need --table-canvas WxH")
        from .io import TableFormat

        w, h = (int(v) for v in size.lower().split("x"))
        table = TableFormat(canvas_w=w, canvas_h=h)
    if args.strict:
        return load_annotations(path, fmt, table=table)
    return load_annotations(
        path, fmt, table=table, on_error=lambda exc: errors.append(str(exc))
    )


# ---------------------------------------------------------------------------
# eval / ablation machinery


@dataclass(frozen=True)
class _Task:
    position: int
    layout: Layout
    saliency_paths: tuple[str, ...]
    canvas_path: str | None
    metrics: tuple[str, ...]


@lru_cache(maxsize=64)
def _cached_raster(path: str, width: int, height: int):
    return load_raster(path, (width, height))


def _run_task(task: _Task) -> tuple[int, LayoutMetrics, tuple[str, ...]]:
    errors: list[str] = []
    layout = task.layout
    saliency = None
    if task.saliency_paths:
        loaded = []
        for p in task.saliency_paths:
            try:
                loaded.append(
                    _cached_raster(p, layout.canvas_w, layout.canvas_h)
                )
            except RasterError as exc:
                errors.append(str(exc))
        if loaded:
            saliency = loaded[0]
            for extra in loaded[1:]:
                saliency = composite_saliency(saliency, extra)
    canvas = None
    if task.canvas_path:
        try:
            canvas = _cached_raster(
                task.canvas_path, layout.canvas_w, layout.canvas_h
            )
        except RasterError as exc:
            errors.append(str(exc))
    result = evaluate_layout(layout, saliency, canvas, task.metrics)
    return task.position, result, tuple(errors)


def _build_tasks(
    layouts: list[Layout],
    saliency_dirs: list[str],
    canvas_dir: str | None,
    metrics: tuple[str, ...],
    errors: list[str],
) -> list[_Task]:
    want_saliency = bool({"uti", "occ"} & set(metrics))
    want_canvas = "rea" in metrics
    tasks = []
    for pos, layout in enumerate(layouts):
        sal_paths = []
        if want_saliency:
            for d in saliency_dirs:
                found = find_raster(d, layout.canvas_id)
                if found is None:
                    errors.append(
                        f"{layout.canvas_id}: no saliency raster in {d}"
                    )
                else:
                    sal_paths.append(str(found))
        canvas_path = None
        if want_canvas and canvas_dir:
            found = find_raster(canvas_dir, layout.canvas_id)
            if found is None:
                errors.append(
                    f"{layout.canvas_id}: no canvas raster in {canvas_dir}"
                )
            else:
                canvas_path = str(found)
        tasks.append(
            _Task(pos, layout, tuple(sal_paths), canvas_path, metrics)
        )
    return tasks


def _run_tasks(
    tasks: list[_Task], jobs: int
) -> tuple[list[LayoutMetrics], list[str]]:
    """Run tasks, returning per-layout results in input order.

    Results are independent of ``jobs``: the pool map preserves order and
    each task is a pure function of its inputs.
    """
    if jobs > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_task, tasks, chunksize=chunk))
    else:
        outputs = [_run_task(t) for t in tasks]
    outputs.sort(key=lambda t: t[0])
    results = [r for _, r, _ in outputs]
    errors = [e for _, _, errs in outputs for e in errs]
    return results, errors


def _report_errors(errors: list[str]) -> None:
    for e in errors:
        print(f"warning: {e}", file=sys.stderr)


def _metric_cell(value: float | None) -> str:
    return "" if value is None else repr(value)


def _write_per_layout_csv(path, results: list[LayoutMetrics]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["canvas_id", "layout_id", "n_elements", *METRIC_NAMES, "flags"]
        )
        for r in results:
            writer.writerow(
                [
                    r.canvas_id,
                    r.layout_id,
                    r.n_elements,
                    *(_metric_cell(r.value(m)) for m in METRIC_NAMES),
                    ";".join(r.flags),
                ]
            )


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_report_csv(path, report: MetricReport) -> None:
    """Aggregate report as one comma-separated record."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = ["n_layouts"]
        for m in METRIC_NAMES:
            header += [m, f"{m}_evaluated", f"{m}_excluded"]
        writer.writerow(header)
        row = [report.n_layouts]
        for m in METRIC_NAMES:
            row += [
                _metric_cell(report.value(m)),
                report.evaluated[m],
                report.excluded[m],
            ]
        writer.writerow(row)


def _report_table(report: MetricReport) -> str:
    lines = [f"{'metric':<8}{'mean':>12}{'evaluated':>11}{'excluded':>10}"]
    for m in METRIC_NAMES:
        v = report.value(m)
        mean = f"{v:.6f}" if v is not None else "-"
        lines.append(
            f"{m:<8}{mean:>12}{report.evaluated[m]:>11}{report.excluded[m]:>10}"
        )
    lines.append(f"layouts: {report.n_layouts}")
    if report.flag_counts:
        flags = ", ".join(f"{k}={v}" for k, v in report.flag_counts.items())
        lines.append(f"flags: {flags}")
    return "\n".join(lines)


def cmd_eval(args) -> int:
    metrics = _parse_metrics(args.metrics)
    errors: list[str] = []
    layouts = _load_layouts(args, errors)
    tasks = _build_tasks(
        layouts, _saliency_dirs(args), args.canvas_dir, metrics, errors
    )
    if args.strict and errors:
        _report_errors(errors)
        print("error: aborting (--strict)", file=sys.stderr)
        return EXIT_INPUT
    results, task_errors = _run_tasks(tasks, args.jobs)
    errors += task_errors
    if args.strict and errors:
        _report_errors(errors)
        print("error: aborting (--strict)", file=sys.stderr)
        return EXIT_INPUT
    report = aggregate(results)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_per_layout_csv(out / "per_layout.csv", results)
    _write_json(out / "report.json", report.to_dict())
    _write_report_csv(out / "report.csv", report)
    _report_errors(errors)
    if args.format == "json":
        print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    else:
        print(_report_table(report))
    return EXIT_OK


def cmd_dsf(args) -> int:
    errors: list[str] = []
    layouts = _load_layouts(args, errors)
    if args.strict and errors:
        _report_errors(errors)
        return EXIT_INPUT
    length = _parse_length(args.length)
    sequencer = DesignSequencer(
        strategy=args.strategy, length=length, seed=args.seed
    )
    sequences = sequencer.fit(layouts).transform(layouts)
    save_sequences(args.out, sequences)
    _report_errors(errors)
    print(f"wrote {len(sequences)} sequences to {args.out}")
    return EXIT_OK


def _report_metrics_dict(report: MetricReport) -> dict:
    return {m: report.value(m) for m in METRIC_NAMES}


def cmd_ablation(args) -> int:
    metrics = _parse_metrics(args.metrics)
    errors: list[str] = []
    layouts = _load_layouts(args, errors)
    if not layouts:
        raise ValueError("ablation needs a non-empty corpus")
    k_long = max_sequence_length(layouts)
    k_short = args.length if args.length else 8
    saliency_dirs = _saliency_dirs(args)

    rows = []
    for strategy in ("random", "geometric", "dsf"):
        reports = {}
        for label, k in (("long", k_long), ("short", k_short)):
            sequencer = DesignSequencer(
                strategy=strategy, length=k, seed=args.seed
            )
            seq_layouts = [
                s.to_layout() for s in sequencer.fit(layouts).transform(layouts)
            ]
            tasks = _build_tasks(
                seq_layouts,
                saliency_dirs,
                args.canvas_dir,
                metrics,
                errors,
            )
            results, task_errors = _run_tasks(tasks, args.jobs)
            errors += task_errors
            reports[label] = aggregate(results)
        diff = {}
        for m in METRIC_NAMES:
            a, b = reports["long"].value(m), reports["short"].value(m)
            diff[m] = None if a is None or b is None else b - a
        try:
            ae = compute_ae(reports["long"], reports["short"])
        except ValueError:
            ae = None
        rows.append(
            {
                "strategy": strategy,
                "short": _report_metrics_dict(reports["short"]),
                "long": _report_metrics_dict(reports["long"]),
                "diff": diff,
                "ae": ae,
            }
        )

    if args.strict and errors:
        _report_errors(errors)
        return EXIT_INPUT

    payload = {
        "schema_version": 1,
        "k_long": k_long,
        "k_short": k_short,
        "rows": rows,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "ablation.json", payload)
    with open(out / "ablation.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = ["strategy"]
        for m in METRIC_NAMES:
            header += [m, f"{m}_diff"]
        header.append("ae")
        writer.writerow(header)
        for row in rows:
            cells = [row["strategy"]]
            for m in METRIC_NAMES:
                cells.append(_metric_cell(row["short"][m]))
                cells.append(_metric_cell(row["diff"][m]))
            cells.append(_metric_cell(row["ae"]))
            writer.writerow(cells)

    _report_errors(errors)
    print(f"sequence lengths: long={k_long} short={k_short}")
    for row in rows:
        ae = row["ae"]
        ae_text = f"{ae:.4f}" if ae is not None else "-"
        print(f"{row['strategy']:<10} AE={ae_text}")
    return EXIT_OK


def cmd_stats(args) -> int:
    errors: list[str] = []
    layouts = _load_layouts(args, errors)
    if args.strict and errors:
        _report_errors(errors)
        return EXIT_INPUT
    stats = dataset_stats(layouts)
    if args.out:
        _write_json(args.out, stats.to_dict())
    _report_errors(errors)
    print(f"poster-layout pairs: {stats.n_pairs}")
    print(f"canvases:            {stats.n_canvases}")
    print(f"max elements:        {stats.max_elements}")
    print(f"complex layouts:     {stats.n_complex} (more than 10 elements)")
    print(f"per class:           {stats.per_class}")
    return EXIT_OK


def _load_canvas_rgb(path, width: int, height: int) -> np.ndarray:
    with Image.open(path) as img:
        rgb = img.convert("RGB")
        if rgb.size != (width, height):
            rgb = rgb.resize((width, height), Image.BILINEAR)
        return np.asarray(rgb, dtype=np.uint8)


def _safe_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-._" else "_" for c in name)


def cmd_render(args) -> int:
    errors: list[str] = []
    layouts = _load_layouts(args, errors)
    if args.strict and errors:
        _report_errors(errors)
        return EXIT_INPUT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    background_dir = args.image_dir or args.canvas_dir
    for pos, layout in enumerate(layouts):
        canvas = None
        if background_dir:
            found = find_raster(background_dir, layout.canvas_id)
            if found is None:
                print(
                    f"warning: {layout.canvas_id}: no canvas image, "
                    f"rendering on blank field",
                    file=sys.stderr,
                )
            else:
                try:
                    canvas = _load_canvas_rgb(
                        found, layout.canvas_w, layout.canvas_h
                    )
                except OSError as exc:
                    print(
                        f"warning: {found}: {exc}; rendering on blank field",
                        file=sys.stderr,
                    )
        image = render_layout(layout, canvas)
        name = _safe_name(layout.layout_id) or str(pos)
        Image.fromarray(image).save(out / f"{name}.png")
    _report_errors(errors)
    print(f"rendered {len(layouts)} layouts to {out}")
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = GenSpec.from_file(args.config)
    if args.seed is not None:
        spec = with_seed(spec, args.seed)
    layouts = []
    if args.saliency:
        saliency = load_raster(args.saliency)
        if (saliency.width, saliency.height) != (spec.canvas_w, spec.canvas_h):
            raise ValueError(
                f"saliency map is {saliency.width}x{saliency.height}, "
                f"spec canvas is {spec.canvas_w}x{spec.canvas_h}"
            )
        stem = Path(args.saliency).stem
        for i in range(args.count):
            layouts.append(
                saliency_grid_layout(
                    saliency, with_seed(spec, spec.seed + i), canvas_id=stem
                )
            )
    else:
        for i in range(args.count):
            layouts.append(
                random_layout(
                    with_seed(spec, spec.seed + i), canvas_id=f"random-{i:05d}"
                )
            )
    save_annotations(args.out, layouts)
    print(f"wrote {len(layouts)} layouts to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_input_flags(sp, *, rasters: bool) -> None:
    sp.add_argument("--annotations", help="annotation file (native format)")
    sp.add_argument(
        "--annotations-format",
        choices=("native", "tabular"),
        default="native",
        help="annotation file format",
    )
    sp.add_argument(
        "--table-canvas",
        metavar="WxH",
        help="canvas size for tabular annotations, e.g. 513x750",
    )
    sp.add_argument(
        "--strict",
        action="store_true",
        help="abort on the first input problem instead of skipping",
    )
    if rasters:
        sp.add_argument(
            "--canvas-dir",
            default=_root_default("canvases"),
            help="directory of canvas images (luminance source)",
        )
        sp.add_argument(
            "--saliency-dirs",
            nargs="+",
            default=None,
            metavar="DIR",
            help="one or two saliency map directories (two are composited "
            "by pixel-wise maximum)",
        )
        sp.add_argument(
            "--image-dir",
            help="directory of background images for rendering "
            "(falls back to --canvas-dir)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posterbench",
        description="Content-aware poster layout benchmark tooling.",
        epilog=(
            "Exit codes: 0 success, 2 input error, 3 internal error. "
            f"Set {ENV_ROOT} to default --annotations/--canvas-dir/"
            "--saliency-dirs beneath one dataset root."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="score layouts and write reports")
    _add_input_flags(p_eval, rasters=True)
    p_eval.add_argument("--metrics", help="comma-separated metric subset")
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.add_argument(
        "--format", choices=("table", "json"), default="table",
        help="stdout summary format",
    )
    p_eval.add_argument(
        "--jobs", type=int, default=DEFAULT_JOBS, help="worker processes"
    )
    p_eval.set_defaults(func=cmd_eval)

    p_dsf = sub.add_parser("dsf", help="write ordered design sequences")
    _add_input_flags(p_dsf, rasters=False)
    p_dsf.add_argument(
        "--strategy",
        choices=("dsf", "geometric", "random"),
        default="dsf",
    )
    p_dsf.add_argument(
        "--length", help="fit sequences to this length ('max' or integer)"
    )
    p_dsf.add_argument("--seed", type=int, default=0)
    p_dsf.add_argument("--out", required=True, help="output sequence file")
    p_dsf.add_argument("--jobs", type=int, default=1, help="accepted for "
                       "interface symmetry; ordering is always sequential")
    p_dsf.set_defaults(func=cmd_dsf)

    p_abl = sub.add_parser(
        "ablation",
        help="compare each ordering strategy at full vs fitted length",
    )
    _add_input_flags(p_abl, rasters=True)
    p_abl.add_argument("--metrics", help="comma-separated metric subset")
    p_abl.add_argument(
        "--length",
        type=int,
        default=8,
        help="short sequence length (long is the corpus maximum)",
    )
    p_abl.add_argument("--seed", type=int, default=0)
    p_abl.add_argument("--out", required=True, help="output directory")
    p_abl.add_argument("--jobs", type=int, default=DEFAULT_JOBS)
    p_abl.set_defaults(func=cmd_ablation)

    p_stats = sub.add_parser("stats", help="dataset statistics")
    _add_input_flags(p_stats, rasters=False)
    p_stats.add_argument("--out", help="optional JSON output file")
    p_stats.set_defaults(func=cmd_stats)

    p_render = sub.add_parser("render", help="draw wireframe previews")
    _add_input_flags(p_render, rasters=True)
    p_render.add_argument("--out", required=True, help="output directory")
    p_render.set_defaults(func=cmd_render)

    p_gen = sub.add_parser("generate", help="emit baseline layouts")
    p_gen.add_argument("--config", required=True, help="GenSpec JSON file")
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.add_argument("--seed", type=int, default=None, help="override spec seed")
    p_gen.add_argument(
        "--saliency",
        help="saliency raster; switches to the grid generator",
    )
    p_gen.add_argument("--out", required=True, help="output annotation file")
    p_gen.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AnnotationError, RasterError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
