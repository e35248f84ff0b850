"""Design-sequence formation: ordering layout elements the way a designer
places them, plus the ablation orderings and fixed-length fitting.

The primary ordering puts the most informative elements first: logos in
reading order (top-left coordinates ascending), then texts by area
descending. Elements that share an underlay are emitted together as one
group, followed by the underlays that decorate them, so an underlay never
precedes everything it sits beneath. Because importance decreases along the
sequence, truncating the tail perturbs the layout as little as possible.

Every ordering is a pure function of (layout, seed) and emits each input
element exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .geometry import box_area, intersection_area
from .model import BBox, Element, ElementClass, Layout
from .rng import SeededRng
from .validation import check_fit_length, check_layout

STRATEGIES = ("dsf", "geometric", "random")

PAD_BOX = BBox(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class UnderlayGroups:
    """Partition of non-underlay elements by the underlays they share.

    ``groups[i]`` lists non-underlay element indices; ``attached[i]`` lists
    the underlay indices decorating that group, largest area first. An
    underlay belongs to a group if it overlaps a member directly or reaches
    one through a chain of overlapping underlays. ``orphans`` are underlays
    overlapping nothing.
    """

    groups: tuple[tuple[int, ...], ...]
    attached: tuple[tuple[int, ...], ...]
    orphans: tuple[int, ...]


@dataclass(frozen=True)
class DesignSequence:
    """An ordered view of a layout's elements.

    ``entries`` keep their source element indices; after length fitting the
    sequence has exactly ``fitted_length`` entries, padded with PAD elements
    (zero boxes) when the layout is shorter. ``orphan_indices`` flags
    underlays that decorated nothing and were appended last.
    """

    canvas_id: str
    canvas_w: int
    canvas_h: int
    entries: tuple[Element, ...]
    strategy: str
    seed: int | None = None
    fitted_length: int | None = None
    orphan_indices: tuple[int, ...] = ()
    layout_id: str = ""

    def __len__(self) -> int:
        return len(self.entries)

    def to_layout(self) -> Layout:
        """View the sequence as a layout (PAD entries included; metrics
        ignore them)."""
        return Layout(
            self.canvas_id,
            self.canvas_w,
            self.canvas_h,
            self.entries,
            self.layout_id,
        )


def _overlaps(a: Element, b: Element) -> bool:
    return intersection_area(a.box, b.box) > 0.0


class _UnionFind:
    def __init__(self, keys):
        self.parent = {k: k for k in keys}

    def find(self, k):
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def group_by_underlay(layout: Layout) -> UnderlayGroups:
    """Group non-underlay elements through the underlays overlapping them.

    Overlap means strictly positive intersection area. Grouping is
    transitive: two texts sharing an underlay merge, and so do groups
    connected through overlapping underlays (underlay below underlay is
    allowed). Elements touching no underlay form singleton groups.
    """
    check_layout(layout, allow_pad=False)
    others = [e for e in layout.elements if e.cls is not ElementClass.UNDERLAY]
    unders = [e for e in layout.elements if e.cls is ElementClass.UNDERLAY]

    uf = _UnionFind([e.index for e in layout.elements])
    for i, u in enumerate(unders):
        for o in others:
            if _overlaps(u, o):
                uf.union(u.index, o.index)
        for v in unders[i + 1 :]:
            if _overlaps(u, v):
                uf.union(u.index, v.index)

    members: dict[int, list[Element]] = {}
    for e in layout.elements:
        members.setdefault(uf.find(e.index), []).append(e)

    def underlay_order(e: Element) -> tuple[float, int]:
        return (-box_area(e.box), e.index)

    groups: list[tuple[int, ...]] = []
    attached: list[tuple[int, ...]] = []
    orphans: list[Element] = []
    for component in members.values():
        non_u = [e for e in component if e.cls is not ElementClass.UNDERLAY]
        us = [e for e in component if e.cls is ElementClass.UNDERLAY]
        if not non_u:
            orphans.extend(us)
            continue
        groups.append(tuple(sorted(e.index for e in non_u)))
        attached.append(
            tuple(e.index for e in sorted(us, key=underlay_order))
        )

    order = sorted(range(len(groups)), key=lambda g: groups[g][0])
    return UnderlayGroups(
        groups=tuple(groups[g] for g in order),
        attached=tuple(attached[g] for g in order),
        orphans=tuple(e.index for e in sorted(orphans, key=underlay_order)),
    )


def form_design_sequence(layout: Layout) -> DesignSequence:
    """Order elements by the designer-imitating heuristic.

    Logos sort by (y1, x1) ascending, texts by area descending; the two
    queues concatenate (logos first). Popping an unemitted element emits its
    whole underlay group in queue order, then the group's underlays, largest
    first. Orphan underlays are appended at the end by area descending and
    flagged. All ties break by original element index, so the result is a
    deterministic permutation of the input.
    """
    check_layout(layout, allow_pad=False)
    groups = group_by_underlay(layout)

    by_index = {e.index: e for e in layout.elements}
    logos = sorted(
        (e for e in layout.elements if e.cls is ElementClass.LOGO),
        key=lambda e: (e.box.y1, e.box.x1, e.index),
    )
    texts = sorted(
        (e for e in layout.elements if e.cls is ElementClass.TEXT),
        key=lambda e: (-box_area(e.box), e.index),
    )
    queue = logos + texts
    queue_pos = {e.index: pos for pos, e in enumerate(queue)}

    group_of: dict[int, int] = {}
    for gid, group in enumerate(groups.groups):
        for idx in group:
            group_of[idx] = gid

    emitted: set[int] = set()
    entries: list[Element] = []

    def emit(idx: int) -> None:
        if idx not in emitted:
            emitted.add(idx)
            entries.append(by_index[idx])

    for e in queue:
        if e.index in emitted:
            continue
        gid = group_of[e.index]
        for idx in sorted(groups.groups[gid], key=queue_pos.__getitem__):
            emit(idx)
        for idx in groups.attached[gid]:
            emit(idx)
    for idx in groups.orphans:
        emit(idx)

    return DesignSequence(
        canvas_id=layout.canvas_id,
        canvas_w=layout.canvas_w,
        canvas_h=layout.canvas_h,
        entries=tuple(entries),
        strategy="dsf",
        orphan_indices=groups.orphans,
        layout_id=layout.layout_id,
    )


def order_geometric(layout: Layout) -> DesignSequence:
    """All elements sorted by top-left coordinates (y1, x1) ascending."""
    check_layout(layout, allow_pad=False)
    entries = tuple(
        sorted(layout.elements, key=lambda e: (e.box.y1, e.box.x1, e.index))
    )
    return DesignSequence(
        canvas_id=layout.canvas_id,
        canvas_w=layout.canvas_w,
        canvas_h=layout.canvas_h,
        entries=entries,
        strategy="geometric",
        layout_id=layout.layout_id,
    )


def order_random(layout: Layout, seed: int) -> DesignSequence:
    """Seeded uniform permutation of the elements (see posterbench.rng for
    the exact procedure; identical across platforms)."""
    check_layout(layout, allow_pad=False)
    entries = list(layout.elements)
    SeededRng(seed).shuffle(entries)
    return DesignSequence(
        canvas_id=layout.canvas_id,
        canvas_w=layout.canvas_w,
        canvas_h=layout.canvas_h,
        entries=tuple(entries),
        strategy="random",
        seed=seed,
        layout_id=layout.layout_id,
    )


def fit_length(seq: DesignSequence, k: int) -> DesignSequence:
    """Truncate or pad a sequence to exactly ``k`` entries.

    Longer sequences keep their first ``k`` entries; shorter ones get PAD
    elements with zero boxes, indexed after the largest existing index.
    """
    check_fit_length(k)
    entries = list(seq.entries[:k])
    next_index = max((e.index for e in entries), default=-1) + 1
    while len(entries) < k:
        entries.append(Element(ElementClass.PAD, PAD_BOX, next_index))
        next_index += 1
    return replace(seq, entries=tuple(entries), fitted_length=k)


def max_sequence_length(layouts) -> int:
    """Largest element count over a corpus (0 for an empty corpus)."""
    return max((len(l.elements) for l in layouts), default=0)


class DesignSequencer(BaseEstimator, TransformerMixin):
    """Transformer turning layouts into (optionally fixed-length) sequences.

    Parameters
    ----------
    strategy : {"dsf", "geometric", "random"}
        Ordering rule; "dsf" is the designer-imitating default.
    length : None, "max", or positive int
        Fixed sequence length. "max" uses the largest element count seen
        during :meth:`fit`; None leaves sequences unfitted.
    seed : int
        Permutation seed for the "random" strategy.

    Follows the scikit-learn estimator conventions (get_params/set_params,
    fit returns self), with X an iterable of :class:`Layout`.
    """

    def __init__(self, strategy: str = "dsf", length=None, seed: int = 0):
        self.strategy = strategy
        self.length = length
        self.seed = seed

    def _check_params(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"strategy must be one of {STRATEGIES}, got {self.strategy!r}"
            )
        if self.length is not None and self.length != "max":
            check_fit_length(self.length)

    def fit(self, X, y=None):
        """Record the corpus maximum element count for length="max"."""
        self._check_params()
        self.max_elements_ = max_sequence_length(list(X))
        return self

    def transform(self, X) -> list[DesignSequence]:
        self._check_params()
        if self.length == "max":
            if not hasattr(self, "max_elements_"):
                raise NotFittedError(
                    "length='max' requires fit() before transform()"
                )
            k = max(1, self.max_elements_)
        else:
            k = self.length

        out = []
        for layout in X:
            if self.strategy == "dsf":
                seq = form_design_sequence(layout)
            elif self.strategy == "geometric":
                seq = order_geometric(layout)
            else:
                seq = order_random(layout, self.seed)
            if k is not None:
                seq = fit_length(seq, k)
            out.append(seq)
        return out
