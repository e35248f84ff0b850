import math

import numpy as np
import pytest

from posterbench import (
    GenSpec,
    Raster,
    metric_occlusion,
    metric_validity,
    random_layout,
    saliency_grid_layout,
)
from posterbench.generators import with_seed
from conftest import TEXT, UNDERLAY


def spec(**overrides):
    kwargs = dict(canvas_w=120, canvas_h=90, seed=1)
    kwargs.update(overrides)
    return GenSpec(**kwargs)


class TestGenSpec:
    def test_rejects_empty_count_range(self):
        with pytest.raises(ValueError):
            spec(n_text=(3, 1))

    def test_rejects_fraction_outside_unit(self):
        with pytest.raises(ValueError):
            spec(width_frac=(0.0, 0.5))
        with pytest.raises(ValueError):
            spec(height_frac=(0.2, 1.5))

    def test_rejects_sub_threshold_minimum_area(self):
        # 0.02 * 0.02 = 4e-4 <= 1e-3: generated elements could be invalid.
        with pytest.raises(ValueError):
            spec(width_frac=(0.02, 0.5), height_frac=(0.02, 0.3))

    def test_underlays_require_a_text(self):
        with pytest.raises(ValueError):
            spec(n_text=(0, 2), n_underlay=(1, 1))

    def test_from_file(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(
            '{"canvas_w": 64, "canvas_h": 64, "n_text": [2, 2], "seed": 5}'
        )
        s = GenSpec.from_file(path)
        assert s.canvas_w == 64
        assert s.n_text == (2, 2)
        assert s.seed == 5


class TestRandomLayout:
    def test_always_valid(self):
        for seed in range(25):
            layout = random_layout(with_seed(spec(n_underlay=(1, 2)), seed))
            assert metric_validity(layout) == 1.0

    def test_deterministic(self):
        a = random_layout(spec())
        b = random_layout(spec())
        assert a == b

    def test_degenerate_count_range(self):
        s = spec(n_text=(4, 4), n_logo=(0, 0), n_underlay=(0, 0))
        layout = random_layout(s)
        assert len(layout.elements) == 4
        assert all(e.cls is TEXT for e in layout.elements)

    def test_no_underlays_unless_requested(self):
        layout = random_layout(spec(n_underlay=(0, 0)))
        assert all(e.cls is not UNDERLAY for e in layout.elements)

    def test_underlay_wraps_a_text(self):
        layout = random_layout(spec(n_text=(1, 1), n_underlay=(1, 1), seed=3))
        unders = [e for e in layout.elements if e.cls is UNDERLAY]
        texts = [e for e in layout.elements if e.cls is TEXT]
        assert unders
        from posterbench import contains

        assert any(contains(unders[0].box, t.box) for t in texts)


class TestSaliencyGridLayout:
    def test_zero_map_fills_row_major(self):
        s = spec(
            canvas_w=80, canvas_h=80, n_text=(3, 3), n_logo=(0, 0),
            n_underlay=(0, 0),
        )
        sal = Raster.full(80, 80, 0.0)
        layout = saliency_grid_layout(sal, s, grid=(4, 4))
        boxes = [e.box.as_tuple() for e in layout.elements]
        assert boxes == [
            (0.0, 0.0, 20.0, 20.0),
            (20.0, 0.0, 40.0, 20.0),
            (40.0, 0.0, 60.0, 20.0),
        ]

    def test_single_quiet_cell_gets_the_element(self):
        values = np.ones((80, 80))
        values[40:60, 20:40] = 0.0  # grid cell (row 2, col 1) on a 4x4 grid
        s = spec(
            canvas_w=80, canvas_h=80, n_text=(1, 1), n_logo=(0, 0),
            n_underlay=(0, 0),
        )
        layout = saliency_grid_layout(Raster(values), s, grid=(4, 4))
        assert layout.elements[0].box.as_tuple() == (20.0, 40.0, 40.0, 60.0)

    def test_capacity_error(self):
        s = spec(
            canvas_w=90, canvas_h=90, n_text=(10, 10), n_logo=(0, 0),
            n_underlay=(0, 0),
        )
        with pytest.raises(ValueError):
            saliency_grid_layout(Raster.full(90, 90, 0.0), s, grid=(3, 3))

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            saliency_grid_layout(Raster.full(10, 10, 0.0), spec())

    def test_deterministic(self):
        sal = Raster(np.random.default_rng(0).random((90, 120)))
        a = saliency_grid_layout(sal, spec())
        b = saliency_grid_layout(sal, spec())
        assert a == b

    def test_occlusion_beats_random_placement_on_average(self):
        # Salient blob in the center; the greedy grid should occlude less
        # than uniform random placement, averaged over many seeds.
        w = h = 96
        yy, xx = np.mgrid[0:h, 0:w]
        blob = np.exp(-(((xx - 48) ** 2 + (yy - 48) ** 2) / (2 * 20.0**2)))
        sal = Raster(blob / blob.max())
        base = spec(
            canvas_w=w, canvas_h=h, n_text=(3, 3), n_logo=(0, 0),
            n_underlay=(0, 0), width_frac=(0.12, 0.12),
            height_frac=(0.12, 0.12),
        )
        grid_occ = []
        rand_occ = []
        for seed in range(100):
            s = with_seed(base, seed)
            grid_occ.append(
                metric_occlusion(saliency_grid_layout(sal, s), sal)
            )
            rand_occ.append(metric_occlusion(random_layout(s), sal))
        assert math.fsum(grid_occ) / 100 <= math.fsum(rand_occ) / 100
