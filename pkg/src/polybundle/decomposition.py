"""Greedy tree-bundle decomposition of a general bundle, and TBD+DP simplification.

A decomposition point set ``D`` splits every line at the points of ``D`` it
visits.  Two split pieces are related when they share a point outside ``D``;
the groups of related pieces must each form a tree bundle.  The greedy
construction grows trees over the union graph of the bundle, pushing edges
(not nodes) through a queue, and stops at any node where lines join or leave.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import Bundle, Metric
from .tree_bundle import Simplification, build_tree_graph, ptbs_dp, validate_ptb
from .shortcut_graph import build_tree_shortcuts

__all__ = [
    "UnionGraph",
    "Component",
    "Decomposition",
    "DecompositionReport",
    "build_union_graph",
    "greedy_tbd",
    "split_lines",
    "validate_decomposition",
    "simplify_general",
]


@dataclass
class UnionGraph:
    nodes: list
    edges: dict  # (a, b) with a < b -> frozenset of line ids
    adjacency: dict

    def lines_on(self, a: int, b: int) -> frozenset:
        return self.edges[(a, b) if a < b else (b, a)]


def build_union_graph(bundle: Bundle) -> UnionGraph:
    acc: dict = {}
    for li, line in enumerate(bundle.lines):
        for a, b in zip(line, line[1:]):
            acc.setdefault((a, b) if a < b else (b, a), set()).add(li)
    adjacency: dict = {}
    for a, b in acc:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    for v in adjacency:
        adjacency[v].sort()
    edges = {k: frozenset(v) for k, v in sorted(acc.items())}
    return UnionGraph(sorted(adjacency), edges, adjacency)


@dataclass(frozen=True)
class Component:
    root: int
    pieces: tuple  # subpolylines, each oriented away from the root

    def points(self) -> set:
        return {v for p in self.pieces for v in p}


@dataclass
class Decomposition:
    d_set: frozenset
    components: list

    def to_text(self) -> str:
        out = ["D " + " ".join(map(str, sorted(self.d_set)))]
        for c in self.components:
            out.append(f"C {c.root} : " + " | ".join(" ".join(map(str, p)) for p in c.pieces))
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Decomposition":
        d_set = None
        comps = []
        for ln, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            tag, _, rest = line.partition(" ")
            try:
                if tag == "D":
                    d_set = frozenset(int(t) for t in rest.split())
                elif tag == "C":
                    root, _, body = rest.partition(":")
                    pieces = tuple(tuple(int(t) for t in p.split()) for p in body.split("|"))
                    comps.append(Component(int(root), pieces))
                else:
                    raise ValueError(f"unknown record {tag!r}")
            except ValueError as exc:
                raise ValueError(f"line {ln}: {exc}") from None
        if d_set is None:
            raise ValueError("missing D record")
        return cls(d_set, comps)


def split_lines(bundle: Bundle, d_set) -> list:
    """Every line cut at the points of ``d_set``; returns ``(line id, piece)`` pairs."""
    out = []
    for li, line in enumerate(bundle.lines):
        start = 0
        for k in range(1, len(line)):
            if line[k] in d_set or k == len(line) - 1:
                out.append((li, tuple(line[start:k + 1])))
                start = k
    return out


def _grow_d_set(bundle: Bundle, graph: UnionGraph) -> set:
    degree = bundle.line_degree()
    d_set = set(bundle.endpoints())
    visited: set = set()
    unvisited_deg = {v: len(graph.adjacency[v]) for v in graph.nodes}
    # max line degree first, lowest index on ties
    order = sorted(graph.nodes, key=lambda v: (-degree[v], v))

    def visit(key):
        visited.add(key)
        unvisited_deg[key[0]] -= 1
        unvisited_deg[key[1]] -= 1

    for root in order:
        if unvisited_deg[root] == 0:
            continue
        d_set.add(root)
        queue = deque()
        for w in graph.adjacency[root]:
            key = (root, w) if root < w else (w, root)
            if key not in visited:
                visit(key)
                queue.append((root, w))
        reached: dict = {}  # node -> tree parent it was first reached from
        while queue:
            u, v = queue.popleft()
            if v not in d_set:
                here = graph.lines_on(u, v)
                others = [w for w in graph.adjacency[v] if w != u]
                keys = [(v, w) if v < w else (w, v) for w in others]
                if all(k not in visited for k in keys) and all(graph.edges[k] <= here for k in keys):
                    reached[v] = u
                    for w, k in zip(others, keys):
                        visit(k)
                        queue.append((v, w))
                    continue
                d_set.add(v)
            if reached.setdefault(v, u) != u:
                # second way into v within this tree: the edge becomes its own piece
                d_set.add(u)
    return d_set


def _components(bundle: Bundle, d_set) -> list:
    pieces = [p for _, p in split_lines(bundle, d_set)]
    parent = list(range(len(pieces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    first: dict = {}
    for i, p in enumerate(pieces):
        for v in p[1:-1]:
            if v in first:
                a, b = find(i), find(first[v])
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                first[v] = i
    groups: dict = {}
    for i in range(len(pieces)):
        groups.setdefault(find(i), []).append(pieces[i])

    degree = bundle.line_degree()
    comps = []
    for members in groups.values():
        common = {members[0][0], members[0][-1]}
        for p in members[1:]:
            common &= {p[0], p[-1]}
        if not common:
            raise AssertionError("decomposition component without a common root")
        root = min(common, key=lambda v: (-degree[v], v))
        oriented = tuple(p if p[0] == root else p[::-1] for p in members)
        comps.append(Component(root, oriented))
    comps.sort(key=lambda c: (c.root, c.pieces))
    return comps


def greedy_tbd(bundle: Bundle) -> Decomposition:
    """Greedy tree-bundle decomposition.  Independent of any distance threshold."""
    graph = build_union_graph(bundle)
    d_set = _grow_d_set(bundle, graph)
    return Decomposition(frozenset(d_set), _components(bundle, d_set))


@dataclass
class DecompositionReport:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def _canon(piece) -> tuple:
    piece = tuple(piece)
    return min(piece, piece[::-1])


def validate_decomposition(bundle: Bundle, dec: Decomposition) -> DecompositionReport:
    """Recompute the split and its intersection graph and compare with ``dec``."""
    d_set = set(dec.d_set)
    missing = sorted(bundle.endpoints() - d_set)
    if missing:
        return DecompositionReport(False, f"line endpoints {missing[:5]} are not in D")
    pieces = [_canon(p) for _, p in split_lines(bundle, d_set)]

    # intersection graph over pieces: shared points outside D
    at_point: dict = {}
    for i, p in enumerate(pieces):
        for v in set(p) - d_set:
            at_point.setdefault(v, []).append(i)
    label = [-1] * len(pieces)
    expected = []
    for s in range(len(pieces)):
        if label[s] >= 0:
            continue
        label[s] = len(expected)
        group = [s]
        stack = [s]
        while stack:
            i = stack.pop()
            for v in set(pieces[i]) - d_set:
                for j in at_point[v]:
                    if label[j] < 0:
                        label[j] = label[s]
                        group.append(j)
                        stack.append(j)
        expected.append(sorted(pieces[i] for i in group))

    given = []
    for ci, comp in enumerate(dec.components):
        for p in comp.pieces:
            if p[0] != comp.root:
                return DecompositionReport(False, f"component {ci}: piece {p} does not start at root {comp.root}")
        given.append(sorted(_canon(p) for p in comp.pieces))
    if sorted(expected) != sorted(given):
        return DecompositionReport(False, "components do not match the intersection graph of the D-split")

    for ci, comp in enumerate(dec.components):
        report = validate_ptb(Bundle(bundle.coords, comp.pieces))
        if not report:
            return DecompositionReport(False, f"component {ci}: {report.reason}")
    return DecompositionReport(True)


def _solve_component(coords, lines, delta, metric):
    local = Bundle(coords, lines)
    tree = build_tree_graph(local)
    graph = build_tree_shortcuts(local, tree, delta, metric)
    return ptbs_dp(tree, graph).kept


def _localize(bundle: Bundle, comp: Component):
    ids = sorted(comp.points())
    index = {v: i for i, v in enumerate(ids)}
    lines = [[index[v] for v in p] for p in comp.pieces]
    return ids, bundle.coords[ids], lines


def simplify_general(bundle: Bundle, delta: float, metric=Metric.FRECHET, jobs: int = 1,
                     dec: Optional[Decomposition] = None, measure: bool = True) -> Simplification:
    """Simplify every component of a greedy decomposition exactly and take the union with ``D``."""
    from .verify import achieved_distances, induced_lines

    if delta < 0:
        raise ValueError("delta must be non-negative")
    metric = Metric.parse(metric)
    if dec is None:
        dec = greedy_tbd(bundle)
    tasks = [_localize(bundle, c) for c in dec.components]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_solve_component, np.array(xy), lines, delta, metric.value)
                       for _, xy, lines in tasks]
            results = [f.result() for f in futures]
    else:
        results = [_solve_component(xy, lines, delta, metric) for _, xy, lines in tasks]

    kept = set(dec.d_set)
    for (ids, _, _), local in zip(tasks, results):
        kept.update(ids[i] for i in local)
    kept = frozenset(kept)
    result = Simplification(kept, induced_lines(bundle, kept), None, delta, metric.value)
    result.extra["decomposition"] = dec
    if measure:
        result.distances = achieved_distances(bundle, kept, metric)
    return result
