"""Shared fixtures and layout builders."""

from __future__ import annotations

import numpy as np
import pytest

from posterbench import BBox, ElementClass, Layout, SeededRng

TEXT = ElementClass.TEXT
LOGO = ElementClass.LOGO
UNDERLAY = ElementClass.UNDERLAY
PAD = ElementClass.PAD


def make_layout(items, canvas=(100, 100), canvas_id="c", layout_id=""):
    """Build a layout from (class, (x1, y1, x2, y2)) pairs."""
    w, h = canvas
    return Layout.build(
        canvas_id,
        w,
        h,
        [(cls, BBox(*box)) for cls, box in items],
        layout_id=layout_id,
    )


def random_test_layout(rng: SeededRng, canvas=(64, 48), max_elements=20):
    """Random integer-coordinate layout exercising all classes and overlap
    patterns, for property suites."""
    w, h = canvas
    n = rng.randint(0, max_elements)
    items = []
    for _ in range(n):
        cls = (TEXT, LOGO, UNDERLAY)[rng.below(3)]
        # Offsets beyond the canvas keep out-of-bounds cases in play.
        x1 = rng.randint(-10, w - 1)
        y1 = rng.randint(-10, h - 1)
        bw = rng.randint(0, w // 2)
        bh = rng.randint(0, h // 2)
        items.append((cls, (x1, y1, x1 + bw, y1 + bh)))
    return make_layout(items, canvas=canvas)


@pytest.fixture
def alg_trace_layout():
    """Logo top-left, two texts of area 12 and 4 sharing one underlay."""
    return make_layout(
        [
            (LOGO, (5, 5, 15, 10)),
            (TEXT, (20, 30, 24, 33)),  # area 12
            (TEXT, (30, 40, 32, 42)),  # area 4
            (UNDERLAY, (19, 29, 35, 45)),
        ]
    )


@pytest.fixture
def saliency_half():
    """64x64 map: left half salient (1.0), right half empty (0.0)."""
    values = np.zeros((64, 64))
    values[:, :32] = 1.0
    return values
