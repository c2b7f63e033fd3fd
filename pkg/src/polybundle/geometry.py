"""Planar primitives: points, polylines, bundles and the two shortcut tests.

A shortcut is the segment between two points of a polyline.  It is valid at
``delta`` when the part of the polyline it replaces stays within ``delta`` of
the segment, measured either with the Hausdorff or with the Frechet distance.

Both decisions are built on the same primitive: the *chord* of the disk of
radius ``delta`` around a vertex, expressed as a parameter interval on the
segment.  Hausdorff validity asks every chord to be non-empty; Frechet validity
additionally asks the chords to be visitable in order (the free space of a
segment against a polyline is a single column of cells, so a running lower
bound on the segment parameter is enough).
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "Metric",
    "Bundle",
    "BundleError",
    "point_segment_distance",
    "segment_chords",
    "hausdorff_ok",
    "frechet_ok",
    "hausdorff_distance",
    "frechet_distance",
    "shortcut_ok",
]


class Metric(str, Enum):
    HAUSDORFF = "hausdorff"
    FRECHET = "frechet"

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


class BundleError(ValueError):
    """Raised for malformed bundles (bad indices, non-simple lines, ...)."""


class Bundle:
    """A point table plus polylines given as index lists into it.

    Instances are immutable; ``coords`` is a read-only ``(n, 2)`` array and
    ``lines`` a tuple of index tuples.
    """

    __slots__ = ("coords", "lines")

    def __init__(self, points, lines):
        coords = np.asarray(points, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(coords)):
            raise BundleError("point coordinates must be finite")
        coords.setflags(write=False)
        n = len(coords)
        frozen = []
        for li, line in enumerate(lines):
            idx = tuple(int(i) for i in line)
            if len(idx) < 2:
                raise BundleError(f"line {li} has fewer than 2 points")
            if len(set(idx)) != len(idx):
                raise BundleError(f"line {li} is not simple")
            for i in idx:
                if not 0 <= i < n:
                    raise BundleError(f"line {li} references point {i} out of range")
            frozen.append(idx)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "lines", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("Bundle is immutable")

    def __reduce__(self):
        return (Bundle, (np.array(self.coords), self.lines))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def ell(self) -> int:
        return len(self.lines)

    def point(self, i: int) -> tuple[float, float]:
        x, y = self.coords[i]
        return float(x), float(y)

    def line_coords(self, li: int) -> np.ndarray:
        return self.coords[list(self.lines[li])]

    def endpoints(self) -> set[int]:
        out = set()
        for line in self.lines:
            out.add(line[0])
            out.add(line[-1])
        return out

    def used_points(self) -> set[int]:
        return {i for line in self.lines for i in line}

    def line_degree(self) -> list[int]:
        deg = [0] * self.n
        for line in self.lines:
            for i in line:
                deg[i] += 1
        return deg

    def __eq__(self, other):
        if not isinstance(other, Bundle):
            return NotImplemented
        return self.lines == other.lines and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.lines, self.coords.tobytes()))

    def __repr__(self):
        return f"Bundle(n={self.n}, ell={self.ell})"


def point_segment_distance(p, a, b) -> float:
    """Euclidean distance from ``p`` to the closed segment ``ab``."""
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / dd
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def segment_chords(a, b, pts, delta):
    """Parameter intervals of ``segment(a, b)`` within ``delta`` of each point.

    Vectorised over the last-but-one axis of ``pts`` and broadcast against
    ``a``/``b``, so a whole (sources x intermediates) block can be evaluated at
    once.  Returns ``(lo, hi, ok)`` where the interval ``[lo, hi]`` is clipped
    to ``[0, 1]`` and ``ok`` is False where it is empty.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pts = np.asarray(pts, dtype=float)
    dx = b[..., 0] - a[..., 0]
    dy = b[..., 1] - a[..., 1]
    wx = pts[..., 0] - a[..., 0]
    wy = pts[..., 1] - a[..., 1]
    dd = dx * dx + dy * dy
    cr = dx * wy - dy * wx
    dt = dx * wx + dy * wy
    d2 = delta * delta
    disc = d2 * dd - cr * cr
    degenerate = dd == 0.0
    safe_dd = np.where(degenerate, 1.0, dd)
    s = np.sqrt(np.maximum(disc, 0.0))
    lo = np.maximum((dt - s) / safe_dd, 0.0)
    hi = np.minimum((dt + s) / safe_dd, 1.0)
    ok = (disc >= 0.0) & (lo <= hi)
    near = (wx * wx + wy * wy) <= d2
    lo = np.where(degenerate, 0.0, lo)
    hi = np.where(degenerate, 1.0, hi)
    ok = np.where(degenerate, near, ok)
    return lo, hi, ok


def _check_endpoints(seg, sub):
    if len(sub) < 2:
        raise ValueError("sub-polyline needs at least two points")
    a, b = seg
    if tuple(map(float, sub[0])) != tuple(map(float, a)) or tuple(
        map(float, sub[-1])
    ) != tuple(map(float, b)):
        raise ValueError("malformed shortcut query: sub-polyline must start and end at the segment endpoints")


def hausdorff_ok(seg, sub, delta: float) -> bool:
    """True iff every vertex of ``sub`` lies within ``delta`` of ``seg``.

    Checking vertices suffices: the distance to a segment is convex along
    each edge of ``sub`` and the endpoints coincide.
    """
    _check_endpoints(seg, sub)
    if len(sub) == 2:
        return True
    _, _, ok = segment_chords(seg[0], seg[1], np.asarray(sub[1:-1], dtype=float), delta)
    return bool(ok.all())


def frechet_ok(seg, sub, delta: float) -> bool:
    """True iff the Frechet distance between ``seg`` and ``sub`` is at most ``delta``."""
    _check_endpoints(seg, sub)
    if len(sub) == 2:
        return True
    lo, hi, ok = segment_chords(seg[0], seg[1], np.asarray(sub[1:-1], dtype=float), delta)
    if not ok.all():
        return False
    return bool(np.all(np.maximum.accumulate(lo) <= hi))


def shortcut_ok(seg, sub, delta: float, metric) -> bool:
    if Metric.parse(metric) is Metric.HAUSDORFF:
        return hausdorff_ok(seg, sub, delta)
    return frechet_ok(seg, sub, delta)


def hausdorff_distance(seg, sub) -> float:
    """Directed distance from ``sub`` to ``seg``; the exact Hausdorff value here."""
    a, b = seg
    return max((point_segment_distance(p, a, b) for p in sub), default=0.0)


def frechet_distance(seg, sub: Sequence, rtol: float = 1e-9) -> float:
    """Frechet distance between a segment and a polyline, by bisection on the decision."""
    _check_endpoints(seg, sub)
    lo = hausdorff_distance(seg, sub)
    if len(sub) == 2 or frechet_ok(seg, sub, lo):
        return lo
    a = np.asarray(seg[0], dtype=float)
    b = np.asarray(seg[1], dtype=float)
    pts = np.asarray(sub, dtype=float)
    hi = float(max(np.hypot(*(pts - a).T).max(), np.hypot(*(pts - b).T).max()))
    while not frechet_ok(seg, sub, hi):
        hi *= 2.0
    while hi - lo > rtol * max(hi, 1e-300):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if frechet_ok(seg, sub, mid):
            hi = mid
        else:
            lo = mid
    return hi
