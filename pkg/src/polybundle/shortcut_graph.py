"""Valid-shortcut graphs for bundles and tree bundles.

Two constructions are provided.  :func:`build_naive` checks every candidate
pair directly (cubic).  :func:`build_tree_hausdorff` runs the cone sweep of
Chan and Chin once towards the root from every node and once away from it,
carrying the cone through the subtree and copying it at branchings
(quadratic).  For the Hausdorff distance both return the same edge set.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .geometry import Bundle, Metric, segment_chords

__all__ = [
    "ShortcutGraph",
    "pair_validity",
    "build_naive",
    "chan_chin_directed",
    "chan_chin_shortcuts",
    "build_tree_hausdorff",
    "build_tree_shortcuts",
]


class ShortcutGraph:
    """Adjacency of valid shortcuts over point indices.

    For tree bundles edges are directed from ancestor to descendant.  For
    generic bundles ``directed`` is False and every edge is stored in both
    adjacency lists.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], directed: bool = True):
        self.n = n
        self.directed = directed
        out = [set() for _ in range(n)]
        for v, w in edges:
            if v == w:
                raise ValueError("shortcut graphs have no self-loops")
            out[v].add(w)
            if not directed:
                out[w].add(v)
        self.adjacency = [sorted(s) for s in out]
        self._sets = out

    def has(self, v: int, w: int) -> bool:
        return w in self._sets[v]

    def out(self, v: int) -> list[int]:
        return self.adjacency[v]

    def edge_set(self) -> set[tuple[int, int]]:
        if self.directed:
            return {(v, w) for v in range(self.n) for w in self.adjacency[v]}
        return {(v, w) for v in range(self.n) for w in self.adjacency[v] if v < w}

    def num_edges(self) -> int:
        return len(self.edge_set())

    def dump(self) -> str:
        """Sorted ``"v w"`` lines, convenient for diffing two builders."""
        return "".join(f"{v} {w}\n" for v, w in sorted(self.edge_set()))

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"ShortcutGraph(n={self.n}, edges={self.num_edges()}, {kind})"


def pair_validity(coords, delta: float, metric, first_target: int = 1) -> np.ndarray:
    """Boolean matrix ``V[i, j]`` (``i < j``) of shortcut validity along one polyline.

    Only targets ``j >= first_target`` are evaluated; other columns stay False.
    """
    metric = Metric.parse(metric)
    coords = np.asarray(coords, dtype=float)
    m = len(coords)
    valid = np.zeros((m, m), dtype=bool)
    frechet = metric is Metric.FRECHET
    for j in range(max(first_target, 1), m):
        src = coords[:j]
        lo, hi, ok = segment_chords(src[:, None, :], coords[j], src[None, :, :], delta)
        inner = np.triu(np.ones((j, j), dtype=bool), 1)
        ok = ok | ~inner
        col = ok.all(axis=1)
        if frechet:
            lo = np.where(inner, lo, 0.0)
            hi = np.where(inner, hi, 1.0)
            col &= (np.maximum.accumulate(lo, axis=1) <= hi).all(axis=1)
        valid[:j, j] = col
    return valid


def _tree_lines_ok(bundle: Bundle, tree) -> None:
    for li, line in enumerate(bundle.lines):
        if line[0] != tree.root:
            raise ValueError(f"tree/bundle mismatch: line {li} does not start at the root")
        for a, b in zip(line, line[1:]):
            if tree.parent[b] != a:
                raise ValueError(f"tree/bundle mismatch: segment {a}-{b} of line {li} is not a tree edge")


def build_naive(bundle: Bundle, delta: float, metric, tree=None) -> ShortcutGraph:
    """Shortcut graph by checking every candidate pair.

    With ``tree`` the bundle is treated as a tree bundle: candidates are
    ancestor/descendant pairs, edges are directed away from the root, and
    pairs on a shared prefix are checked only once.  Without it every pair of
    points on a common line is a candidate and must be valid on all lines
    containing both.
    """
    metric = Metric.parse(metric)
    if tree is not None:
        _tree_lines_ok(bundle, tree)
        seen: set[int] = set()
        edges = []
        for line in bundle.lines:
            f = 0
            while f < len(line) and line[f] in seen:
                f += 1
            if f < len(line):
                valid = pair_validity(bundle.coords[list(line)], delta, metric, first_target=f)
                ii, jj = np.nonzero(valid)
                edges.extend((line[i], line[j]) for i, j in zip(ii.tolist(), jj.tolist()))
                seen.update(line)
        return ShortcutGraph(bundle.n, edges, directed=True)

    status: dict[tuple[int, int], bool] = {}
    for line in bundle.lines:
        valid = pair_validity(bundle.coords[list(line)], delta, metric)
        m = len(line)
        ii, jj = np.triu_indices(m, 1)
        for i, j, ok in zip(ii.tolist(), jj.tolist(), valid[ii, jj].tolist()):
            v, w = line[i], line[j]
            key = (v, w) if v < w else (w, v)
            if not ok:
                status[key] = False
            elif key not in status:
                status[key] = True
    return ShortcutGraph(bundle.n, [k for k, ok in status.items() if ok], directed=False)


# Cone ("wedge") of admissible directions from a sweep origin.  ``None`` is the
# whole plane, ``False`` the empty cone, otherwise ``(rx, ry, lo, hi)``: angles
# in ``[lo, hi]`` measured from the reference direction ``(rx, ry)``.  Every
# constraint spans less than a half-plane, so relative angles never wrap.
_EMPTY = False


def _constrain(wedge, px, py, ox, oy, delta):
    if wedge is _EMPTY:
        return wedge
    wx, wy = ox - px, oy - py
    d2 = wx * wx + wy * wy
    if d2 <= delta * delta:
        return wedge
    half = math.asin(delta / math.sqrt(d2))
    if wedge is None:
        return (wx, wy, -half, half)
    rx, ry, lo, hi = wedge
    theta = math.atan2(rx * wy - ry * wx, rx * wx + ry * wy)
    lo = max(lo, theta - half)
    hi = min(hi, theta + half)
    if lo > hi:
        return _EMPTY
    return (rx, ry, lo, hi)


def _in_wedge(wedge, px, py, qx, qy) -> bool:
    if wedge is None:
        return True
    if wedge is _EMPTY:
        return False
    ux, uy = qx - px, qy - py
    if ux == 0.0 and uy == 0.0:
        return False
    rx, ry, lo, hi = wedge
    phi = math.atan2(rx * uy - ry * ux, rx * ux + ry * uy)
    return lo <= phi <= hi


def _sweep(coords, order: Sequence[int], delta: float) -> list[int]:
    """Positions ``k`` in ``order`` such that ``order[0] -> order[k]`` is a directed shortcut."""
    px, py = coords[order[0]]
    wedge = None
    found = []
    for k in range(1, len(order)):
        qx, qy = coords[order[k]]
        if _in_wedge(wedge, px, py, qx, qy):
            found.append(k)
        wedge = _constrain(wedge, px, py, qx, qy, delta)
        if wedge is _EMPTY:
            break
    return found


def chan_chin_directed(points, delta: float) -> set[tuple[int, int]]:
    """Forward directed shortcuts ``(i, j)``, ``i < j``, of a single polyline.

    ``j`` qualifies when it lies in the cone from ``i`` tangent to the
    ``delta``-disks around every vertex strictly between them.
    """
    coords = [tuple(map(float, p)) for p in points]
    m = len(coords)
    out = set()
    for i in range(m - 1):
        for k in _sweep(coords, range(i, m), delta):
            out.add((i, i + k))
    return out


def chan_chin_shortcuts(points, delta: float) -> set[tuple[int, int]]:
    """Undirected Hausdorff shortcuts of one polyline: both directed versions must exist."""
    coords = [tuple(map(float, p)) for p in points]
    m = len(coords)
    forward = chan_chin_directed(coords, delta)
    backward = chan_chin_directed(coords[::-1], delta)
    return forward & {(m - 1 - j, m - 1 - i) for i, j in backward}


def build_tree_hausdorff(bundle: Bundle, tree, delta: float) -> ShortcutGraph:
    """Hausdorff shortcut graph of a tree bundle in quadratic time."""
    _tree_lines_ok(bundle, tree)
    coords = [tuple(map(float, p)) for p in bundle.coords]
    nodes = tree.nodes

    rootward: set[tuple[int, int]] = set()
    for p in nodes:
        path = [p]
        while tree.parent[path[-1]] is not None:
            path.append(tree.parent[path[-1]])
        for k in _sweep(coords, path, delta):
            rootward.add((p, path[k]))

    edges = []
    children = tree.children
    for p in nodes:
        px, py = coords[p]
        # wedges are immutable tuples, so pushing one per child is the branch copy
        stack = [(c, None) for c in reversed(children[p])]
        while stack:
            w, wedge = stack.pop()
            qx, qy = coords[w]
            if _in_wedge(wedge, px, py, qx, qy) and (w, p) in rootward:
                edges.append((p, w))
            wedge = _constrain(wedge, px, py, qx, qy, delta)
            if wedge is _EMPTY:
                continue
            for c in reversed(children[w]):
                stack.append((c, wedge))
    return ShortcutGraph(bundle.n, edges, directed=True)


def build_tree_shortcuts(bundle: Bundle, tree, delta: float, metric) -> ShortcutGraph:
    """Fastest available builder for a tree bundle: the sweep for Hausdorff, naive otherwise."""
    if Metric.parse(metric) is Metric.HAUSDORFF:
        return build_tree_hausdorff(bundle, tree, delta)
    return build_naive(bundle, delta, Metric.FRECHET, tree=tree)
