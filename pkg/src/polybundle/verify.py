"""Ground truth: simplification validation, achieved distances, exhaustive PBS, min-link paths."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .geometry import (
    Bundle,
    Metric,
    frechet_distance,
    hausdorff_distance,
    shortcut_ok,
)

__all__ = [
    "ValidationReport",
    "induced_lines",
    "segment_distance",
    "achieved_distances",
    "validate_simplification",
    "brute_force_pbs",
    "min_link_path",
    "CSV_HEADER",
    "csv_row",
]

CSV_HEADER = "algo,delta,delta_f,ratio,n,ell,size,time_ms"


@dataclass
class ValidationReport:
    valid: bool
    per_line: list = field(default_factory=list)
    worst: Optional[tuple] = None  # (line id, (a, b), distance)
    consistency: bool = True
    missing_endpoints: list = field(default_factory=list)
    failing: Optional[tuple] = None  # first (line id, (a, b)) failing the check

    def __bool__(self):
        return self.valid

    @property
    def max_distance(self) -> float:
        return max(self.per_line, default=0.0)


def induced_lines(bundle: Bundle, kept) -> list:
    kept = set(kept)
    return [tuple(v for v in line if v in kept) for line in bundle.lines]


def _check_kept(bundle: Bundle, kept) -> set:
    kept = set(int(k) for k in kept)
    bad = [k for k in kept if not 0 <= k < bundle.n]
    if bad:
        raise ValueError(f"kept set references unknown points {sorted(bad)[:5]}")
    return kept


def _pieces(bundle: Bundle, li: int, kept: set):
    line = bundle.lines[li]
    pos = [i for i, v in enumerate(line) if v in kept]
    for i, j in zip(pos, pos[1:]):
        yield line[i], line[j], bundle.coords[list(line[i:j + 1])]


def segment_distance(sub, metric) -> float:
    seg = (sub[0], sub[-1])
    if Metric.parse(metric) is Metric.HAUSDORFF:
        return hausdorff_distance(seg, sub)
    return frechet_distance(seg, sub)


def achieved_distances(bundle: Bundle, kept, metric) -> list:
    """Per line, the largest distance between a simplified segment and what it replaces."""
    kept = _check_kept(bundle, kept)
    out = []
    for li in range(bundle.ell):
        worst = 0.0
        for _, _, sub in _pieces(bundle, li, kept):
            if len(sub) > 2:
                worst = max(worst, segment_distance(sub, metric))
        out.append(worst)
    return out


def validate_simplification(bundle: Bundle, kept, delta: float, metric, measure: bool = True) -> ValidationReport:
    """Check endpoints and every induced segment at ``delta``.

    Validity uses the same decision procedure as the algorithms; the measured
    distances are reported alongside.
    """
    metric = Metric.parse(metric)
    kept = _check_kept(bundle, kept)
    missing = sorted(v for v in bundle.endpoints() if v not in kept)
    valid = not missing
    failing = None
    per_line = []
    worst = None
    for li in range(bundle.ell):
        line_worst = 0.0
        for a, b, sub in _pieces(bundle, li, kept):
            if len(sub) <= 2:
                continue
            if not shortcut_ok((sub[0], sub[-1]), sub, delta, metric):
                valid = False
                if failing is None:
                    failing = (li, (a, b))
            if measure:
                d = segment_distance(sub, metric)
                line_worst = max(line_worst, d)
                if worst is None or d > worst[2]:
                    worst = (li, (a, b), d)
        per_line.append(line_worst)
    if worst is None and failing is not None:
        worst = (failing[0], failing[1], float("nan"))
    return ValidationReport(valid, per_line, worst, True, missing, failing)


def brute_force_pbs(bundle: Bundle, delta: float, metric, cap: int = 20) -> frozenset:
    """Exact minimum consistent simplification by exhaustive enumeration.

    Every subset of the removable points (those that are not a line endpoint)
    is tried; the smallest valid kept set wins, ties broken by the
    lexicographically smallest sorted tuple of kept removable points.
    """
    metric = Metric.parse(metric)
    fixed = bundle.endpoints()
    removable = sorted(bundle.used_points() - fixed)
    r = len(removable)
    if r > cap:
        raise ValueError(f"{r} removable points exceed the oracle cap of {cap}")
    bit = {v: k for k, v in enumerate(removable)}

    tables = []
    for line in bundle.lines:
        m = len(line)
        pts = bundle.coords[list(line)]
        ok = np.zeros((m, m), dtype=bool)
        for i in range(m - 1):
            ok[i, i + 1] = True
            for j in range(i + 2, m):
                ok[i, j] = shortcut_ok((pts[i], pts[j]), pts[i:j + 1], delta, metric)
        tables.append((line, ok))

    best_count = None
    best = []
    chunk = 1 << 16
    for start in range(0, 1 << r, chunk):
        masks = np.arange(start, min(start + chunk, 1 << r), dtype=np.int64)
        valid = np.ones(len(masks), dtype=bool)
        for line, ok in tables:
            last = np.zeros(len(masks), dtype=np.int64)
            for pos in range(1, len(line)):
                v = line[pos]
                if v in bit:
                    keep = ((masks >> bit[v]) & 1).astype(bool)
                    valid &= ~keep | ok[last, pos]
                    last = np.where(keep, pos, last)
                else:
                    valid &= ok[last, pos]
                    last[:] = pos
        if not valid.any():
            continue
        good = masks[valid]
        counts = np.array([bin(int(g)).count("1") for g in good])
        c = int(counts.min())
        if best_count is None or c < best_count:
            best_count, best = c, list(good[counts == c])
        elif c == best_count:
            best.extend(good[counts == c])
    assert best_count is not None, "keeping every point is always valid"
    choice = min(tuple(removable[k] for k in range(r) if (int(g) >> k) & 1) for g in best)
    return frozenset(fixed | set(choice))


def min_link_path(shortcuts, s: int, t: int) -> int:
    """Fewest shortcut edges from ``s`` to ``t`` (breadth-first search)."""
    if s == t:
        return 0
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w in shortcuts.out(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                if w == t:
                    return dist[w]
                queue.append(w)
    raise ValueError(f"{t} is unreachable from {s}")


def csv_row(algo: str, delta: float, delta_f: float, n: int, ell: int, size: int, time_ms: float) -> str:
    ratio = delta_f / delta if delta > 0 else float("nan")
    return f"{algo},{delta:.6g},{delta_f:.6g},{ratio:.4f},{n},{ell},{size},{time_ms:.3f}"
