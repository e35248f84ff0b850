"""Input validation helpers for the public entry points.

These mirror the check_* convention of estimator libraries: each helper
either returns its (possibly normalized) input or raises ValueError with a
message naming the offending field.
"""

from __future__ import annotations

from .model import ElementClass, Layout


def check_layout(
    layout: Layout, *, allow_pad: bool = True, name: str = "layout"
) -> Layout:
    """Verify a layout is canonical; optionally reject PAD entries.

    Canonical means every element box has x1 <= x2 and y1 <= y2. Finiteness
    and index uniqueness are already construction invariants.
    """
    if not isinstance(layout, Layout):
        raise ValueError(f"{name} must be a Layout, got {type(layout).__name__}")
    for e in layout.elements:
        if not e.box.is_canonical:
            raise ValueError(
                f"{name}: element {e.index} box {e.box.as_tuple()} is not "
                f"canonical; run canonicalize_layout first"
            )
        if not allow_pad and e.cls is ElementClass.PAD:
            raise ValueError(
                f"{name}: element {e.index} is a PAD entry, which only "
                f"length-fitting may produce"
            )
    return layout


def check_fit_length(k: int) -> int:
    """Validate a fixed sequence length (must be a positive integer)."""
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"fitted length must be a positive integer, got {k!r}")
    return k
