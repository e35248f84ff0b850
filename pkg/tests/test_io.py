import json

import numpy as np
import pytest
from PIL import Image

from posterbench import (
    AnnotationError,
    RasterError,
    TableFormat,
    dataset_stats,
    fit_length,
    form_design_sequence,
    load_annotations,
    load_raster,
    load_sequences,
    save_annotations,
    save_sequences,
)
from conftest import TEXT, UNDERLAY, make_layout

HEADER = '{"format": "poster-layouts", "version": 1}'


def write_native(path, records):
    lines = [HEADER] + [json.dumps(r) for r in records]
    path.write_text("\n".join(lines) + "\n")


def minimal_record(**overrides):
    record = {
        "canvas_id": "a",
        "canvas_w": 100,
        "canvas_h": 100,
        "elements": [{"class": "text", "box": [0, 0, 10, 10]}],
    }
    record.update(overrides)
    return record


class TestNativeFormat:
    def test_minimal_record(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_native(path, [minimal_record()])
        layouts = load_annotations(path)
        assert len(layouts) == 1
        (layout,) = layouts
        assert layout.canvas_id == "a"
        assert len(layout.elements) == 1
        assert layout.elements[0].cls is TEXT
        assert layout.elements[0].index == 0

    def test_boxes_canonicalized_and_indices_in_file_order(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_native(
            path,
            [
                minimal_record(
                    elements=[
                        {"class": "logo", "box": [30, 40, 10, 20]},
                        {"class": "underlay", "box": [0, 0, 5, 5]},
                    ]
                )
            ],
        )
        (layout,) = load_annotations(path)
        assert layout.elements[0].box.as_tuple() == (10.0, 20.0, 30.0, 40.0)
        assert [e.index for e in layout.elements] == [0, 1]

    def test_unknown_class_reports_line(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_native(
            path,
            [
                minimal_record(),
                minimal_record(
                    elements=[{"class": "sticker", "box": [0, 0, 1, 1]}]
                ),
            ],
        )
        with pytest.raises(AnnotationError) as err:
            load_annotations(path)
        assert err.value.line == 3
        assert "sticker" in str(err.value)

    def test_pad_class_rejected_at_ingestion(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_native(
            path,
            [minimal_record(elements=[{"class": "pad", "box": [0, 0, 0, 0]}])],
        )
        with pytest.raises(AnnotationError):
            load_annotations(path)

    def test_malformed_box_rejected(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_native(
            path,
            [minimal_record(elements=[{"class": "text", "box": [0, 0, 1]}])],
        )
        with pytest.raises(AnnotationError):
            load_annotations(path)

    def test_lenient_collects_and_skips(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_native(
            path,
            [
                minimal_record(canvas_id="good1"),
                minimal_record(canvas_id="bad", canvas_w=-5),
                minimal_record(canvas_id="good2"),
            ],
        )
        errors = []
        layouts = load_annotations(path, on_error=errors.append)
        assert [l.canvas_id for l in layouts] == ["good1", "good2"]
        assert len(errors) == 1 and errors[0].line == 3

    def test_empty_file_is_empty_list(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        path.write_text(HEADER + "\n")
        assert load_annotations(path) == []

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        path.write_text(json.dumps(minimal_record()) + "\n")
        with pytest.raises(AnnotationError):
            load_annotations(path)

    def test_split_filter(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_native(
            path,
            [
                minimal_record(canvas_id="tr", split="train"),
                minimal_record(canvas_id="te", split="test"),
            ],
        )
        layouts = load_annotations(path, split="test")
        assert [l.canvas_id for l in layouts] == ["te"]

    def test_round_trip_lossless(self, tmp_path):
        layouts = [
            make_layout(
                [(TEXT, (0.5, 1.25, 10, 12)), (UNDERLAY, (-3, -2, 40, 41))],
                canvas_id="x",
                layout_id="7",
            ),
            make_layout([], canvas_id="y", layout_id="8"),
        ]
        p1 = tmp_path / "a.jsonl"
        p2 = tmp_path / "b.jsonl"
        save_annotations(p1, layouts)
        first = load_annotations(p1)
        save_annotations(p2, first)
        second = load_annotations(p2)
        assert first == second
        assert first == layouts


class TestSequenceFiles:
    def test_round_trip_with_pads_and_metadata(self, tmp_path):
        layout = make_layout(
            [(TEXT, (0, 0, 20, 20)), (UNDERLAY, (-1, -1, 25, 25))],
            layout_id="42",
        )
        seq = fit_length(form_design_sequence(layout), 5)
        path = tmp_path / "seq.jsonl"
        save_sequences(path, [seq])
        (loaded,) = load_sequences(path)
        assert loaded == seq

    def test_order_field_lists_source_indices(self, tmp_path):
        layout = make_layout(
            [(TEXT, (0, 50, 10, 60)), (TEXT, (0, 0, 40, 40))]
        )
        seq = form_design_sequence(layout)
        path = tmp_path / "seq.jsonl"
        save_sequences(path, [seq])
        lines = path.read_text().strip().splitlines()
        record = json.loads(lines[1])
        assert record["order"] == [1, 0]  # larger text first
        assert record["strategy"] == "dsf"


class TestTabularAdapter:
    def test_row_with_three_boxes(self, tmp_path):
        path = tmp_path / "ann.csv"
        path.write_text(
            "poster_path,total_elem,cls_elem,box_elem\n"
            'train/p1.png,3,"[1, 2, 3]",'
            '"[[0, 0, 10, 10], [20, 20, 30, 30], [5, 5, 15, 15]]"\n'
        )
        table = TableFormat(canvas_w=100, canvas_h=100)
        (layout,) = load_annotations(path, "tabular", table=table)
        assert [e.cls.value for e in layout.elements] == [
            "text",
            "logo",
            "underlay",
        ]
        assert layout.canvas_id == "train/p1.png"
        assert layout.canvas_w == 100

    def test_zero_ids_skipped(self, tmp_path):
        path = tmp_path / "ann.csv"
        path.write_text(
            "poster_path,cls_elem,box_elem\n"
            'p.png,"[1, 0, 0]","[[0, 0, 10, 10], [0, 0, 0, 0], [0, 0, 0, 0]]"\n'
        )
        (layout,) = load_annotations(
            path, "tabular", table=TableFormat(canvas_w=50, canvas_h=50)
        )
        assert len(layout.elements) == 1

    def test_unknown_id_reports_line(self, tmp_path):
        path = tmp_path / "ann.csv"
        path.write_text(
            "poster_path,cls_elem,box_elem\n"
            'p.png,"[7]","[[0, 0, 10, 10]]"\n'
        )
        with pytest.raises(AnnotationError) as err:
            load_annotations(
                path, "tabular", table=TableFormat(canvas_w=50, canvas_h=50)
            )
        assert err.value.line == 2
        assert "7" in str(err.value)

    def test_custom_class_map(self, tmp_path):
        path = tmp_path / "ann.csv"
        path.write_text(
            "poster_path,cls_elem,box_elem\n"
            'p.png,"[9]","[[0, 0, 10, 10]]"\n'
        )
        table = TableFormat(canvas_w=50, canvas_h=50, class_map={9: "logo"})
        (layout,) = load_annotations(path, "tabular", table=table)
        assert layout.elements[0].cls.value == "logo"

    def test_tabular_requires_table(self, tmp_path):
        with pytest.raises(ValueError):
            load_annotations(tmp_path / "x.csv", "tabular")


class TestLoadRaster:
    def test_grayscale_values_scaled(self, tmp_path):
        arr = np.array([[0, 255], [128, 64]], dtype=np.uint8)
        path = tmp_path / "g.png"
        Image.fromarray(arr, mode="L").save(path)
        raster = load_raster(path)
        assert raster.values.tolist() == [
            [0.0, 1.0],
            [128 / 255, 64 / 255],
        ]

    def test_white_color_image_is_all_ones(self, tmp_path):
        arr = np.full((4, 5, 3), 255, dtype=np.uint8)
        path = tmp_path / "w.png"
        Image.fromarray(arr, mode="RGB").save(path)
        raster = load_raster(path)
        assert np.all(raster.values == 1.0)

    def test_color_reduces_with_luma_weights(self, tmp_path):
        arr = np.zeros((2, 2, 3), dtype=np.uint8)
        arr[..., 0] = 200  # red only
        path = tmp_path / "r.png"
        Image.fromarray(arr, mode="RGB").save(path)
        raster = load_raster(path)
        assert raster.values[0, 0] == pytest.approx(0.299 * 200 / 255, abs=1e-12)

    def test_expected_dims_enforced(self, tmp_path):
        path = tmp_path / "g.png"
        Image.fromarray(np.zeros((50, 50), dtype=np.uint8), mode="L").save(path)
        with pytest.raises(RasterError):
            load_raster(path, expected_size=(100, 100))
        load_raster(path, expected_size=(50, 50))

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "not_an_image.png"
        path.write_text("hello")
        with pytest.raises(RasterError):
            load_raster(path)


class TestDatasetStats:
    def test_histogram_and_max(self):
        # Two layouts share canvas "a".
        layouts = [
            make_layout([(TEXT, (0, 0, 10, 10))], canvas_id="a"),
            make_layout(
                [(TEXT, (0, 0, 10, 10)), (TEXT, (20, 20, 30, 30))],
                canvas_id="a",
            ),
            make_layout(
                [(TEXT, (i, i, i + 5, i + 5)) for i in range(5)],
                canvas_id="b",
            ),
        ]
        stats = dataset_stats(layouts)
        assert stats.n_pairs == 3
        assert stats.n_canvases == 2
        assert stats.histogram == {1: 1, 2: 1, 5: 1}
        assert stats.max_elements == 5
        assert stats.per_class == {"text": 8}
        assert sum(stats.histogram.values()) == stats.n_pairs

    def test_complex_count(self):
        layouts = [
            make_layout(
                [(TEXT, (i, 0, i + 1, 1)) for i in range(n)], canvas_id=str(n)
            )
            for n in (2, 2, 5, 12)
        ]
        stats = dataset_stats(layouts)
        assert stats.n_complex == 1

    def test_empty(self):
        stats = dataset_stats([])
        assert stats.n_pairs == 0
        assert stats.n_canvases == 0
        assert stats.histogram == {}
        assert stats.max_elements == 0
        assert stats.n_complex == 0
