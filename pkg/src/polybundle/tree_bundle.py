"""Tree bundles: tree graph, validation, and the exact subtree-cover DP.

For a node ``v`` let ``s(v)`` be the optimal number of kept nodes in the
subtree ``Sub(v)`` given that ``v`` itself is kept.  Every root-to-leaf path
below ``v`` must contain a *cover node* ``w`` with a shortcut ``(v, w)``.  A
helper value ``h`` is computed in post-order over ``Sub(v)``::

    h(w) = s(w)           if (v, w) is a shortcut, else INF
    h(w) = min(h(w), sum(h(u) for u in children(w)))

and ``s(v) = 1 + sum(h(u) for u in children(v))``.  Processing the nodes in
global post-order makes every ``s(w)`` below ``v`` available in time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .geometry import Bundle, Metric
from .shortcut_graph import ShortcutGraph, build_tree_shortcuts

__all__ = [
    "TreeBundleError",
    "TreeGraph",
    "PTBReport",
    "DPState",
    "Simplification",
    "build_tree_graph",
    "validate_ptb",
    "dp_table",
    "ptbs_dp",
    "simplify_tree",
]


class TreeBundleError(ValueError):
    """The bundle is not a polyline tree bundle."""


@dataclass
class TreeGraph:
    root: int
    parent: list  # parent[v], None for the root and for points outside the tree
    children: list
    nodes: list
    leaves: frozenset
    postorder: list
    # index of each node in ``postorder``, and its subtree size
    post_index: dict = field(repr=False, default_factory=dict)
    size: dict = field(repr=False, default_factory=dict)

    def depth(self, v: int) -> int:
        d = 0
        while self.parent[v] is not None:
            v = self.parent[v]
            d += 1
        return d

    def subtree(self, v: int) -> list:
        """Nodes of ``Sub(v)`` in post-order, ``v`` last."""
        end = self.post_index[v] + 1
        return self.postorder[end - self.size[v]: end]

    def path_to_root(self, v: int) -> list:
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out


@dataclass(frozen=True)
class PTBReport:
    ok: bool
    reason: str = ""
    pair: Optional[tuple] = None

    def __bool__(self):
        return self.ok


@dataclass
class DPState:
    s: dict
    covers: dict
    inf: int


@dataclass
class Simplification:
    kept: frozenset
    per_line: list = field(default_factory=list)
    distances: Optional[list] = None
    delta: Optional[float] = None
    metric: Optional[str] = None
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.kept)

    @property
    def delta_f(self) -> Optional[float]:
        if not self.distances:
            return None
        return max(self.distances)


def _scan_tree(bundle: Bundle):
    """Parent map from all lines; returns ``(root, parent, owner, problem)``."""
    if not bundle.lines:
        raise TreeBundleError("empty bundle")
    root = bundle.lines[0][0]
    parent = {root: None}
    owner = {root: 0}
    for li, line in enumerate(bundle.lines):
        if line[0] != root:
            return root, parent, owner, (f"line {li} starts at {line[0]}, not at root {root}", (0, li))
        for a, b in zip(line, line[1:]):
            if b in parent:
                if parent[b] != a:
                    return root, parent, owner, (f"node {b} has two parents", (owner[b], li))
            else:
                parent[b] = a
                owner[b] = li
    return root, parent, owner, None


def build_tree_graph(bundle: Bundle) -> TreeGraph:
    """Union of the root-anchored directed paths of a tree bundle."""
    root, parent_map, _, problem = _scan_tree(bundle)
    if problem is not None:
        raise TreeBundleError(problem[0])
    parent = [None] * bundle.n
    children = [[] for _ in range(bundle.n)]
    # children in order of first appearance along the lines
    for line in bundle.lines:
        for a, b in zip(line, line[1:]):
            if parent[b] is None:
                parent[b] = a
                children[a].append(b)
    nodes = sorted(parent_map)
    leaves = frozenset(v for v in nodes if not children[v])

    postorder = []
    stack = [(root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            postorder.append(v)
            continue
        stack.append((v, True))
        for c in reversed(children[v]):
            stack.append((c, False))
    post_index = {v: i for i, v in enumerate(postorder)}
    size = {}
    for v in postorder:
        size[v] = 1 + sum(size[c] for c in children[v])
    return TreeGraph(root, parent, children, nodes, leaves, postorder, post_index, size)


def validate_ptb(bundle: Bundle) -> PTBReport:
    """Common root, pairwise intersections are common prefixes, no line ends mid-way on another."""
    if not bundle.lines:
        return PTBReport(False, "empty bundle")
    _, parent, owner, problem = _scan_tree(bundle)
    if problem is not None:
        return PTBReport(False, problem[0], problem[1])
    interior = {}
    for li, line in enumerate(bundle.lines):
        for v in line[1:-1]:
            interior.setdefault(v, li)
    for li, line in enumerate(bundle.lines):
        end = line[-1]
        if end in interior:
            return PTBReport(False, f"line {li} ends at {end}, which is interior to line {interior[end]}",
                             (interior[end], li))
    return PTBReport(True)


def dp_table(tree: TreeGraph, shortcuts: ShortcutGraph, prune: bool = True) -> DPState:
    """Optimal subtree sizes ``s`` and the cover nodes chosen for each node."""
    inf = len(tree.nodes) + 1
    children = tree.children
    parent = tree.parent
    s: dict = {}
    covers: dict = {}
    h: dict = {}
    via_children: dict = {}

    for v in tree.postorder:
        kids = children[v]
        if not kids:
            s[v] = 1
            covers[v] = []
            continue
        ends = shortcuts.out(v)
        if prune:
            marked = {v}
            for w in ends:
                while w not in marked:
                    marked.add(w)
                    w = parent[w]
            marked.discard(v)
            order = sorted(marked, key=tree.post_index.__getitem__)
        else:
            order = tree.subtree(v)[:-1]
            marked = None
        short = set(ends)
        for w in order:
            hw = s[w] if w in short else inf
            from_kids = False
            if children[w]:
                total = 0
                for u in children[w]:
                    if marked is not None and u not in marked:
                        total = inf
                        break
                    total += h[u]
                    if total >= inf:
                        total = inf
                        break
                if total < hw:
                    hw = total
                    from_kids = True
            h[w] = hw
            via_children[w] = from_kids

        total = 0
        for u in kids:
            if marked is not None and u not in marked:
                total = inf
                break
            total = min(inf, total + h[u])
        if total >= inf:
            raise ValueError(f"shortcut graph is missing tree edges below node {v}")
        s[v] = total + 1

        chosen = []
        stack = list(reversed(kids))
        while stack:
            u = stack.pop()
            if via_children[u]:
                stack.extend(reversed(children[u]))
            else:
                chosen.append(u)
        covers[v] = chosen
    return DPState(s, covers, inf)


def ptbs_dp(tree: TreeGraph, shortcuts: ShortcutGraph, prune: bool = True) -> Simplification:
    """Minimum node set containing root and leaves whose shortcut-induced subgraph is connected."""
    state = dp_table(tree, shortcuts, prune=prune)
    kept = {tree.root}
    stack = [tree.root]
    while stack:
        x = stack.pop()
        for c in state.covers[x]:
            if c not in kept:
                kept.add(c)
                stack.append(c)
    assert len(kept) == state.s[tree.root]
    return Simplification(frozenset(kept))


def simplify_tree(bundle: Bundle, delta: float, metric=Metric.FRECHET, prune: bool = True,
                  measure: bool = True) -> Simplification:
    """Full tree pipeline: validate, tree graph, shortcut graph, DP."""
    from .verify import induced_lines, achieved_distances

    report = validate_ptb(bundle)
    if not report:
        raise TreeBundleError(report.reason)
    metric = Metric.parse(metric)
    tree = build_tree_graph(bundle)
    graph = build_tree_shortcuts(bundle, tree, delta, metric)
    result = ptbs_dp(tree, graph, prune=prune)
    result.per_line = induced_lines(bundle, result.kept)
    result.delta = delta
    result.metric = metric.value
    if measure:
        result.distances = achieved_distances(bundle, result.kept, metric)
    return result
