"""Embedded graphs and the benchmark bundle generators built on them.

Tree bundles are grown by a breadth-first search from a root: the first
``size`` discovered nodes form the tree and every leaf contributes the path
from the root to it.  General bundles are unions of several such trees over
the same point set.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from ..geometry import Bundle

__all__ = [
    "EmbeddedGraph",
    "GraphParseError",
    "read_graph",
    "write_graph",
    "road_grid_graph",
    "grid_graph",
    "star_graph",
    "gen_tree_bundle",
    "gen_general_bundle",
]


class GraphParseError(ValueError):
    pass


@dataclass
class EmbeddedGraph:
    coords: dict = field(default_factory=dict)  # node id -> (x, y)
    adjacency: dict = field(default_factory=dict)  # node id -> sorted neighbour ids

    @classmethod
    def from_edges(cls, coords: dict, edges) -> "EmbeddedGraph":
        adj = {v: set() for v in coords}
        for u, v in edges:
            if u == v:
                continue
            if u not in adj or v not in adj:
                raise ValueError(f"edge ({u}, {v}) references an unknown node")
            adj[u].add(v)
            adj[v].add(u)
        return cls(dict(coords), {v: sorted(n) for v, n in adj.items()})

    @property
    def nodes(self) -> list:
        return sorted(self.coords)

    def edges(self) -> list:
        return [(u, v) for u in self.nodes for v in self.adjacency[u] if u < v]

    def component(self, start) -> set:
        seen = {start}
        stack = [start]
        while stack:
            for w in self.adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def read_graph(text: str) -> EmbeddedGraph:
    """Parse ``nodes:`` (``id x y``) and ``edges:`` (``u v``) sections."""
    section = None
    coords, edges = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        low = body.lower()
        if low in ("nodes:", "edges:"):
            section = low[:-1]
            continue
        parts = body.split()
        try:
            if section == "nodes" and len(parts) == 3:
                nid = int(parts[0])
                if nid in coords:
                    raise GraphParseError(f"line {lineno}: duplicate node {nid}")
                coords[nid] = (float(parts[1]), float(parts[2]))
            elif section == "edges" and len(parts) == 2:
                edges.append((int(parts[0]), int(parts[1])))
            else:
                raise GraphParseError(f"line {lineno}: unexpected record {body!r}")
        except ValueError as exc:
            if isinstance(exc, GraphParseError):
                raise
            raise GraphParseError(f"line {lineno}: {exc}") from None
    try:
        return EmbeddedGraph.from_edges(coords, edges)
    except ValueError as exc:
        raise GraphParseError(str(exc)) from None


def write_graph(graph: EmbeddedGraph) -> str:
    out = ["nodes:"]
    out += [f"{v} {x:.17g} {y:.17g}" for v, (x, y) in sorted(graph.coords.items())]
    out.append("edges:")
    out += [f"{u} {v}" for u, v in graph.edges()]
    return "\n".join(out) + "\n"


def grid_graph(rows: int, cols: int, spacing: float = 1.0) -> EmbeddedGraph:
    coords = {r * cols + c: (c * spacing, r * spacing) for r in range(rows) for c in range(cols)}
    edges = [(r * cols + c, r * cols + c + 1) for r in range(rows) for c in range(cols - 1)]
    edges += [(r * cols + c, (r + 1) * cols + c) for r in range(rows - 1) for c in range(cols)]
    return EmbeddedGraph.from_edges(coords, edges)


def star_graph(k: int, radius: float = 1.0) -> EmbeddedGraph:
    import math

    coords = {0: (0.0, 0.0)}
    for i in range(k):
        a = 2 * math.pi * i / k
        coords[i + 1] = (radius * math.cos(a), radius * math.sin(a))
    return EmbeddedGraph.from_edges(coords, [(0, i + 1) for i in range(k)])


def road_grid_graph(rows: int, cols: int, seed=0, spacing: float = 1.0, jitter: float = 0.3,
                    drop: float = 0.25) -> EmbeddedGraph:
    """Perturbed grid with some streets removed; always connected.

    A random spanning tree of the grid is kept intact, every other edge
    survives with probability ``1 - drop``.
    """
    rng = random.Random(seed)
    base = grid_graph(rows, cols, spacing)
    coords = {v: (x + rng.uniform(-jitter, jitter) * spacing, y + rng.uniform(-jitter, jitter) * spacing)
              for v, (x, y) in sorted(base.coords.items())}
    edges = base.edges()
    rng.shuffle(edges)
    parent = list(range(rows * cols))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    keep = []
    for u, v in edges:
        a, b = find(u), find(v)
        if a != b:
            parent[a] = b
            keep.append((u, v))
        elif rng.random() >= drop:
            keep.append((u, v))
    return EmbeddedGraph.from_edges(coords, keep)


def _bfs_paths(graph: EmbeddedGraph, root, size: int, rng: random.Random) -> list:
    if root not in graph.coords:
        raise ValueError(f"root {root} is not a node of the graph")
    if size < 2:
        raise ValueError("a tree bundle needs at least 2 nodes")
    parent = {root: None}
    order = [root]
    queue = deque([root])
    while queue and len(order) < size:
        v = queue.popleft()
        nbrs = list(graph.adjacency[v])
        rng.shuffle(nbrs)
        for w in nbrs:
            if w not in parent:
                parent[w] = v
                order.append(w)
                queue.append(w)
                if len(order) == size:
                    break
    if len(order) < size:
        raise ValueError(f"component of root {root} has only {len(order)} nodes, {size} requested")
    has_child = {parent[v] for v in order if parent[v] is not None}
    paths = []
    for leaf in order:
        if leaf in has_child:
            continue
        path = [leaf]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        paths.append(path[::-1])
    return paths


def _assemble(graph: EmbeddedGraph, paths: list) -> Bundle:
    index: dict = {}
    for path in paths:
        for v in path:
            index.setdefault(v, len(index))
    coords = [graph.coords[v] for v in index]
    return Bundle(coords, [[index[v] for v in p] for p in paths])


def gen_tree_bundle(graph: EmbeddedGraph, root=None, size: int = 100, seed=0) -> Bundle:
    """Tree bundle from a BFS of ``size`` nodes; one polyline per BFS leaf."""
    rng = random.Random(seed)
    if root is None:
        root = rng.choice(graph.nodes)
    return _assemble(graph, _bfs_paths(graph, root, size, rng))


def gen_general_bundle(graph: EmbeddedGraph, roots=None, sizes=100, seed=0, count: int = 2) -> Bundle:
    """Union of tree bundles grown from several roots over one point set."""
    rng = random.Random(seed)
    if roots is None:
        roots = [None] * count
    if isinstance(sizes, int):
        sizes = [sizes] * len(roots)
    if len(sizes) != len(roots):
        raise ValueError("need one size per root")
    paths = []
    for root, size in zip(roots, sizes):
        if root is None:
            root = rng.choice(graph.nodes)
        paths += _bfs_paths(graph, root, size, rng)
    return _assemble(graph, paths)
