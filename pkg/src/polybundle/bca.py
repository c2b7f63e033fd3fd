"""Bi-criteria star-cover simplification (valid at twice the threshold).

A star is a center point together with some valid Frechet shortcuts incident
to it.  A shortcut ``(q, p)`` bridges all segments between ``q`` and ``p`` on
each line that contains both.  Per line a star selects the farthest shortcut
on either side of its center, so it bridges one contiguous run of segments.
Stars are picked greedily by the number of still unbridged segments; all
points of the chosen stars plus the line endpoints form the simplification.
Consecutive kept points then lie inside one valid shortcut, which bounds their
Frechet distance by twice the threshold.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .geometry import Bundle, Metric
from .shortcut_graph import build_naive
from .tree_bundle import Simplification

__all__ = ["Star", "StarCover", "build_stars", "bca_simplify"]


@dataclass
class Star:
    center: int
    shortcuts: frozenset  # other endpoints of the selected shortcuts
    spans: dict  # line id -> (first, last) bridged segment index, inclusive

    @property
    def points(self) -> frozenset:
        return self.shortcuts | {self.center}

    @property
    def covered(self) -> set:
        return {(li, k) for li, (a, b) in self.spans.items() for k in range(a, b + 1)}


@dataclass
class StarCover:
    stars: list
    universe: int  # number of (line, segment) pairs
    rounds: list = field(default_factory=list)  # newly bridged count per chosen star

    @property
    def centers(self) -> list:
        return [s.center for s in self.stars]

    def points(self) -> set:
        return {v for s in self.stars for v in s.points}


def build_stars(bundle: Bundle, delta: float) -> dict:
    """Star of every used point, selecting the farthest shortcut per line and side."""
    graph = build_naive(bundle, delta, Metric.FRECHET)
    positions: dict = {}
    for li, line in enumerate(bundle.lines):
        for k, v in enumerate(line):
            positions.setdefault(v, []).append((li, k))
    stars = {}
    for p, where in sorted(positions.items()):
        ends = set()
        spans = {}
        for li, k in where:
            line = bundle.lines[li]
            lo = hi = k
            for j, q in enumerate(line):
                # a line's own segment always bridges itself, even when the
                # pair is an invalid shortcut on some other line
                if j != k and (abs(j - k) == 1 or graph.has(p, q)):
                    lo = min(lo, j)
                    hi = max(hi, j)
            if hi > lo:
                spans[li] = (lo, hi - 1)
                ends.update({line[lo], line[hi]} - {p})
        stars[p] = Star(p, frozenset(ends), spans)
    return stars


def bca_simplify(bundle: Bundle, delta: float, halve: bool = False, measure: bool = True) -> Simplification:
    """Greedy star cover at ``delta`` (or ``delta / 2`` with ``halve``)."""
    from .verify import achieved_distances, induced_lines

    if delta < 0:
        raise ValueError("delta must be non-negative")
    run_delta = delta / 2 if halve else delta
    stars = build_stars(bundle, run_delta)
    covered = [np.zeros(len(line) - 1, dtype=bool) for line in bundle.lines]
    remaining = sum(len(c) for c in covered)
    universe = remaining

    def gain(star):
        return sum(int(b - a + 1 - covered[li][a:b + 1].sum()) for li, (a, b) in star.spans.items())

    heap = [(-gain(s), p) for p, s in stars.items()]
    heapq.heapify(heap)
    chosen, rounds = [], []
    while remaining:
        key, p = heapq.heappop(heap)
        g = gain(stars[p])
        if g == 0:
            continue
        if g != -key:
            heapq.heappush(heap, (-g, p))
            continue
        star = stars[p]
        for li, (a, b) in star.spans.items():
            covered[li][a:b + 1] = True
        remaining -= g
        chosen.append(star)
        rounds.append(g)

    cover = StarCover(chosen, universe, rounds)
    kept = frozenset(cover.points() | bundle.endpoints())
    result = Simplification(kept, induced_lines(bundle, kept), None, delta, Metric.FRECHET.value)
    result.extra["cover"] = cover
    result.extra["run_delta"] = run_delta
    if measure:
        result.distances = achieved_distances(bundle, kept, Metric.FRECHET)
    return result
