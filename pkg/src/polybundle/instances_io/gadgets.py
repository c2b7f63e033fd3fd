"""Planar hardness instances from graphs (minimum independent dominating set).

Each graph vertex becomes a vertical zigzag (vertex gadget) that admits a
single long shortcut from its top to its bottom point.  Each edge ``uv`` and
each closed neighbourhood ``N[v]`` becomes a horizontal polyline that shares
one point with the vertex gadgets involved and runs a zigzag between them, so
that its cheap long skip is available only if the right shared points are
dropped.  Where a horizontal polyline passes an unrelated vertex gadget the
two are made to meet in an extra crossing point placed next to an existing
point of each line.

Layout, for vertex ``k`` at ``X = k * x_spacing``:

* vertex points alternate between ``X - a`` and ``X + a`` (``a = 0.9 delta``)
  with vertical steps between 3 and 6 delta; every point shared with, or
  crossed by, a horizontal gadget sits on the ``X + a`` side;
* horizontal gadgets are stacked ``14 delta`` apart;
* edge zigzags alternate between ``delta + gamma`` above and
  ``3/5 delta - gamma`` below the gadget base line, neighbourhood zigzags
  between ``4/5 delta`` above and below.

Coordinates are chosen from these rules and the result is checked: planarity,
the point bound, the shortcut pattern of every gadget, and that crossing
points create no shortcut endpoints the nearby original points lacked.  Any
failure raises :class:`GadgetError` naming the gadget.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..geometry import Bundle, Metric, shortcut_ok
from ..shortcut_graph import build_naive
from .planarity import find_crossings

__all__ = [
    "GadgetError",
    "MidsGraph",
    "GadgetParams",
    "compute_eta",
    "gen_gadget_instance",
    "check_gadget_instance",
    "intended_solution",
    "point_bound",
]

_A = 0.9  # half width of a vertex gadget, in delta
_BETA = 0.4  # height of edge-gadget end points above the base line, in delta
_STEP = 3.0  # minimum vertical step inside vertex gadgets, in delta
_CAP = 4.0  # step between a vertex gadget's end point and its first slot
_LAYER = 14.0  # vertical distance of consecutive horizontal gadgets
_CLEAR = 3.0  # horizontal clearance around vertex gadgets, in delta
_MARGIN = 0.2  # slack on the flat-pocket rule of edge gadgets


class GadgetError(ValueError):
    def __init__(self, msg, gadget=None):
        super().__init__(f"{gadget}: {msg}" if gadget is not None else msg)
        self.gadget = gadget


@dataclass(frozen=True)
class MidsGraph:
    n_hat: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n_hat < 2:
            raise ValueError("a gadget graph needs at least 2 vertices")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n_hat and 0 <= v < self.n_hat):
                raise ValueError(f"edge ({u}, {v}) out of range")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise ValueError(f"duplicate edge {e}")
            norm.add(e)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def c(self) -> float:
        return len(self.edges) / self.n_hat

    def neighbours(self, v: int) -> set:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    def closed_neighbourhood(self, v: int) -> list:
        return sorted(self.neighbours(v) | {v})

    def is_independent(self, s) -> bool:
        s = set(s)
        return not any(u in s and v in s for u, v in self.edges)

    def is_dominating(self, s) -> bool:
        s = set(s)
        return all(set(self.closed_neighbourhood(v)) & s for v in range(self.n_hat))

    def independent_dominating_sets(self) -> list:
        out = []
        for r in range(1, self.n_hat + 1):
            for s in itertools.combinations(range(self.n_hat), r):
                if self.is_independent(s) and self.is_dominating(s):
                    out.append(frozenset(s))
        return out

    @classmethod
    def all_graphs(cls, n_hat: int) -> list:
        pairs = list(itertools.combinations(range(n_hat), 2))
        return [cls(n_hat, tuple(p for p, bit in zip(pairs, bits) if bit))
                for bits in itertools.product((0, 1), repeat=len(pairs))]


@dataclass(frozen=True)
class GadgetParams:
    """Construction parameters; ``None`` fields are derived from the graph.

    ``t`` is the span of every neighbourhood zigzag and ``eta`` the crossing
    safety radius; both are outputs of the construction, a supplied ``eta``
    is only accepted if it does not exceed the computed one.
    """

    delta: float = 1.0
    gamma: Optional[float] = None
    x_spacing: Optional[float] = None
    t: Optional[float] = None
    eta: Optional[float] = None
    metric: str = "frechet"


def point_bound(g: MidsGraph) -> float:
    """Upper bound ``30 c n^3`` on the instance size, with ``c`` at least 1."""
    return 30.0 * max(1.0, g.c) * g.n_hat ** 3


def compute_eta(bundle: Bundle, delta: float) -> float:
    """Smallest excess over ``delta`` of any same-line point-to-candidate distance.

    Over all triples ``p < o < q`` on a line, the distance from ``o`` to the
    segment ``pq`` is taken whenever it exceeds ``delta``; the minimum of
    those minus ``delta`` is returned (``inf`` if there is none).
    """
    best = math.inf
    for line in bundle.lines:
        pts = bundle.coords[list(line)]
        m = len(pts)
        for p in range(m - 2):
            a = pts[p]
            b = pts[p + 2:]  # targets q = p + 2 ..
            o = pts[p + 1:m - 1]  # inner points o = p + 1 .. m - 2
            d = b - a
            dd = (d * d).sum(axis=1)
            w = o[None, :, :] - a
            t = np.clip((w * d[:, None, :]).sum(axis=2) / dd[:, None], 0.0, 1.0)
            gap = w - t[:, :, None] * d[:, None, :]
            dist = np.hypot(gap[..., 0], gap[..., 1])
            # o strictly between p and q: inner index j < target index i + 1
            mask = np.tril(np.ones((len(b), len(o)), dtype=bool))
            over = dist[mask & (dist > delta)]
            if over.size:
                best = min(best, float(over.min()) - delta)
    return best


# ---------------------------------------------------------------- layout

def _zigzag(x0, x1, count, rows, targets, eps, delta, name):
    """``count`` points spread evenly on ``[x0, x1]``, alternating rows.

    ``targets`` maps vertex ids to the x coordinate of the vertex point they
    cross; the nearest zigzag point is moved to ``eps`` left of it.  Returns
    a list of ``(x, y, vertex or None)``.
    """
    xs = list(np.linspace(x0, x1, count))
    tag = [None] * count
    for k, tx in sorted(targets.items()):
        i = int(np.argmin([abs(x - tx) for x in xs]))
        if tag[i] is not None:
            raise GadgetError("two crossings snap to the same zigzag point", name)
        tag[i] = k
        xs[i] = tx - eps
    for a, b in zip(xs, xs[1:]):
        if b - a < _CLEAR * delta:
            raise GadgetError("zigzag points closer than 3 delta", name)
    return [(x, rows[i % 2], tag[i]) for i, x in enumerate(xs)]


def _gamma_for(g: MidsGraph, delta: float) -> float:
    gamma = delta / 10
    # the flat-pocket rule needs rho * (span + 1/2) < 1 for the longest edge
    span = max((v - u for u, v in g.edges), default=1)
    rho = gamma / (_BETA * delta) * (1 + _MARGIN)
    if rho * (span + 0.5) > 0.8:
        rho = 0.8 / (span + 0.5)
        gamma = rho * _BETA * delta / (1 + _MARGIN)
    return gamma


class _Builder:
    def __init__(self, g: MidsGraph, delta, gamma, s, eps):
        self.g, self.delta, self.gamma, self.s, self.eps = g, delta, gamma, s, eps
        self.k = 2 * g.n_hat ** 2 + 1
        self.a = _A * delta
        self.coords: list = []

    def X(self, k):
        return k * self.s

    def add(self, x, y) -> int:
        self.coords.append((float(x), float(y)))
        return len(self.coords) - 1

    # horizontal plans: entries ('pt', x, y) | ('shared', k) | ('cross', k, x, y)
    def edge_plan(self, u, v, y0):
        d, a, s = self.delta, self.a, self.s
        name = ("edge", (u, v))
        x_s, x_e = self.X(u) - s / 2, self.X(v) + s / 2
        x_su, x_sv = self.X(u) + a, self.X(v) + a
        rho = self.gamma / (_BETA * d) * (1 + _MARGIN)
        lo = x_su + rho * (x_e - x_su) + _CLEAR * d
        hi = x_sv - rho * (x_sv - x_s) - _CLEAR * d
        if hi - lo < 2 * _CLEAR * d * (self.k - 1):
            raise GadgetError("x_spacing too small for the edge zigzag", name)
        targets = {k: self.X(k) + a for k in range(u + 1, v)}
        for k, tx in targets.items():
            if not lo + _CLEAR * d < tx < hi - _CLEAR * d:
                raise GadgetError("crossed vertex outside the flat pocket", name)
        rows = (y0 + d + self.gamma, y0 - 0.6 * d + self.gamma)
        zz = _zigzag(lo, hi, self.k, rows, targets, self.eps, d, name)
        plan = [("pt", x_s, y0 + _BETA * d), ("shared", u)]
        plan += [("pt", x, y) if k is None else ("cross", k, x, y) for x, y, k in zz]
        plan += [("shared", v), ("pt", x_e, y0 + _BETA * d)]
        return plan

    def nbhd_plan(self, v, y0):
        d, a, s, n = self.delta, self.a, self.s, self.g.n_hat
        name = ("neighbourhood", v)
        members = self.g.closed_neighbourhood(v)
        rows = (y0 + 0.8 * d, y0 - 0.8 * d)
        x_first, x_last = self.X(0) - s / 2, self.X(n - 1) + s / 2
        t = x_last - x_first
        bounds = [x_first]
        for u in members:
            bounds += [self.X(u) - a - _CLEAR * d, self.X(u) + a + _CLEAR * d]
        bounds.append(x_last)
        plan = [("pt", x_first - 3 * t, y0 + 0.5 * d)]
        for pi in range(len(members) + 1):
            x0, x1 = bounds[2 * pi], bounds[2 * pi + 1]
            if x1 - x0 < 2 * _CLEAR * d * (self.k - 1):
                raise GadgetError("x_spacing too small for the neighbourhood zigzag", name)
            targets = {k: self.X(k) + a for k in range(n)
                       if k not in members and x0 < self.X(k) < x1}
            zz = _zigzag(x0, x1, self.k, rows, targets, self.eps, d, name)
            plan += [("pt", x, y) if k is None else ("cross", k, x, y) for x, y, k in zz]
            if pi < len(members):
                plan.append(("shared", members[pi]))
        plan.append(("pt", x_last + 3 * t, y0 + 0.5 * d))
        return plan, t

    def build(self):
        g, d = self.g, self.delta
        gadgets = [("edge", e) for e in g.edges] + [("neighbourhood", v) for v in range(g.n_hat)]
        plans, t = {}, None
        for j, gd in enumerate(gadgets):
            y0 = -j * _LAYER * d
            if gd[0] == "edge":
                plans[gd] = self.edge_plan(*gd[1], y0)
            else:
                plans[gd], t = self.nbhd_plan(gd[1], y0)
            plans[gd] = (y0, plans[gd])

        # vertex slots: (height, gadget, kind)
        slots = {k: [] for k in range(g.n_hat)}
        for gd, (y0, plan) in plans.items():
            for item in plan:
                if item[0] == "shared":
                    slots[item[1]].append((y0, gd, "shared"))
                elif item[0] == "cross":
                    slots[item[1]].append((item[3], gd, "cross"))

        meta_v, slot_id = {}, {}
        lines, names = [], []
        for k in range(g.n_hat):
            xs = self.X(k)
            hs = sorted(slots[k], key=lambda r: -r[0])
            ys, sides, kinds = [hs[0][0] + 2 * _CAP * d], [0], ["top"]
            ys.append(hs[0][0] + _CAP * d)
            sides.append(-1)
            kinds.append("filler")
            for i, (y, gd, kind) in enumerate(hs):
                if i:
                    gap = ys[-1] - y
                    m = 2 * int(gap // (2 * _STEP * d))
                    if m < 2:
                        raise GadgetError("vertical slots too close", ("vertex", k))
                    prev = hs[i - 1][0]
                    for r in range(1, m):
                        ys.append(prev - gap / m * r)
                        sides.append(-1 if r % 2 else 1)
                        kinds.append("filler")
                ys.append(y)
                sides.append(1)
                kinds.append(("slot", gd))
            ys += [hs[-1][0] - _CAP * d, hs[-1][0] - 2 * _CAP * d]
            sides += [-1, 0]
            kinds += ["filler", "bottom"]
            ids = [self.add(xs + sd * self.a, y) for y, sd in zip(ys, sides)]
            for pid, kind in zip(ids, kinds):
                if isinstance(kind, tuple):
                    slot_id[(k, kind[1])] = pid
            meta_v[k] = {"line": len(lines), "points": ids, "top": ids[0], "bottom": ids[-1],
                         "slots": {kind[1]: pid for pid, kind in zip(ids, kinds) if isinstance(kind, tuple)}}
            lines.append(ids)
            names.append(("vertex", k))

        meta_e, meta_n, partners = {}, {}, []
        for gd, (y0, plan) in plans.items():
            ids = []
            for item in plan:
                if item[0] == "pt":
                    ids.append(self.add(item[1], item[2]))
                elif item[0] == "shared":
                    ids.append(slot_id[(item[1], gd)])
                else:
                    c = self.add(item[2], item[3])
                    partners.append((slot_id[(item[1], gd)], c))
                    ids.append(c)
            entry = {"line": len(lines), "points": list(ids), "first": ids[0], "last": ids[-1], "y0": y0}
            if gd[0] == "edge":
                u, v = gd[1]
                entry["shared"] = {u: slot_id[(u, gd)], v: slot_id[(v, gd)]}
                meta_e[gd[1]] = entry
            else:
                entry["shared"] = {u: slot_id[(u, gd)] for u in g.closed_neighbourhood(gd[1])}
                meta_n[gd[1]] = entry
            lines.append(ids)
            names.append(gd)
        return lines, names, meta_v, meta_e, meta_n, partners, t


def _planarize(bundle: Bundle, names):
    """Insert a point at every crossing; returns the new bundle and crossings."""
    coords = [tuple(p) for p in bundle.coords.tolist()]
    owner = {}
    for li, line in enumerate(bundle.lines):
        for a, b in zip(line, line[1:]):
            owner.setdefault((min(a, b), max(a, b)), li)
    inserts = {}  # segment -> [(param along a->b, point id)]
    crossings = []
    for s1, s2 in find_crossings(bundle):
        if set(s1) & set(s2):
            raise GadgetError("overlapping segments", names[owner[s1]])
        p, r = np.array(coords[s1[0]]), np.array(coords[s1[1]]) - np.array(coords[s1[0]])
        q, u = np.array(coords[s2[0]]), np.array(coords[s2[1]]) - np.array(coords[s2[0]])
        den = r[0] * u[1] - r[1] * u[0]
        if den == 0:
            raise GadgetError("collinear crossing", names[owner[s1]])
        w = q - p
        t1 = (w[0] * u[1] - w[1] * u[0]) / den
        t2 = (w[0] * r[1] - w[1] * r[0]) / den
        pt = p + t1 * r
        pid = len(coords)
        coords.append((float(pt[0]), float(pt[1])))
        inserts.setdefault(s1, []).append((t1, pid))
        inserts.setdefault(s2, []).append((t2, pid))
        near1 = s1[0] if t1 < 0.5 else s1[1]
        near2 = s2[0] if t2 < 0.5 else s2[1]
        # skip points ordered as (vertex line point, horizontal line point)
        if names[owner[s1]][0] != "vertex":
            near1, near2 = near2, near1
        crossings.append((pid, near1, near2))
    lines = []
    for line in bundle.lines:
        out = [line[0]]
        for a, b in zip(line, line[1:]):
            key = (min(a, b), max(a, b))
            extra = sorted(inserts.get(key, []))
            if a > b:
                extra = extra[::-1]
            out += [pid for _, pid in extra]
            out.append(b)
        lines.append(out)
    return Bundle(coords, lines), crossings


def _x_spacing_for(g: MidsGraph, delta: float, gamma: float) -> float:
    k = 2 * g.n_hat ** 2 + 1
    rho = gamma / (_BETA * delta) * (1 + _MARGIN)
    # the unit-span edge pocket has width (1 - 3 rho) s minus clearances
    need = 2 * _CLEAR * delta * (k - 1) + 4 * _CLEAR * delta
    return math.ceil(need / max(1 - 3 * rho, 0.05) / delta) * delta


def gen_gadget_instance(g: MidsGraph, params: GadgetParams = GadgetParams()):
    """Build the planar instance for ``g``; returns ``(bundle, metadata)``."""
    delta = float(params.delta)
    if not delta > 0:
        raise GadgetError("delta must be positive")
    gamma = _gamma_for(g, delta) if params.gamma is None else float(params.gamma)
    if not 0 < gamma < delta / 5:
        raise GadgetError("gamma must lie in (0, delta/5)")
    s = _x_spacing_for(g, delta, gamma) if params.x_spacing is None else float(params.x_spacing)
    if s <= 0:
        raise GadgetError("x_spacing must be positive")
    metric = Metric.parse(params.metric)

    eps = 0.05 * delta
    for _ in range(60):
        b = _Builder(g, delta, gamma, s, eps)
        lines, names, meta_v, meta_e, meta_n, partners, t = b.build()
        base = Bundle(b.coords, lines)
        eta = compute_eta(base, delta)
        if eps <= eta / 4:
            break
        eps = eta / 8
    else:
        raise GadgetError("could not place crossing points inside the safety radius")
    if params.t is not None and not math.isclose(params.t, t):
        raise GadgetError(f"t is fixed by x_spacing to {t}, got {params.t}")
    if params.eta is not None and params.eta > eta:
        raise GadgetError(f"eta {params.eta} exceeds the computed safety radius {eta}")

    bundle, crossings = _planarize(base, names)
    meta = {
        "graph": g,
        "params": replace(params, gamma=gamma, x_spacing=s, t=t, eta=eta),
        "epsilon": eps,
        "metric": metric.value,
        "n_original": base.n,
        "names": names,
        "vertex": meta_v,
        "edge": meta_e,
        "neighbourhood": meta_n,
        "crossings": crossings,
        "partners": partners,
    }
    meta["intended"] = _intended_shortcuts(meta)
    # where gadgets would be chained into a single pair of lines
    meta["attach"] = {names[li]: (line[0], line[-1]) for li, line in enumerate(bundle.lines)}
    report = check_gadget_instance(bundle, meta)
    if report["failures"]:
        gadget, msg = report["failures"][0]
        raise GadgetError(msg, gadget)
    meta["report"] = report
    return bundle, meta


def _intended_shortcuts(meta) -> dict:
    out = {}
    for k, e in meta["vertex"].items():
        out[("vertex", k)] = [(e["top"], e["bottom"])]
    for (u, v), e in meta["edge"].items():
        su, sv = e["shared"][u], e["shared"][v]
        out[("edge", (u, v))] = [(e["first"], sv), (su, e["last"]), (e["first"], e["last"])]
    for v, e in meta["neighbourhood"].items():
        bs = [e["shared"][u] for u in sorted(e["shared"])]
        pairs = [(e["first"], x) for x in bs] + [(x, e["last"]) for x in bs]
        pairs += list(itertools.combinations(bs, 2))
        out[("neighbourhood", v)] = pairs
    return out


def _skip_ok(bundle, li, i, j, delta, metric) -> bool:
    line = bundle.lines[li]
    a, b = line.index(i), line.index(j)
    sub = bundle.coords[list(line[a:b + 1])]
    return shortcut_ok((sub[0], sub[-1]), sub, delta, metric)


def check_gadget_instance(bundle: Bundle, meta) -> dict:
    """Re-derive every structural claim about a generated instance.

    Returns a report with a ``failures`` list of ``(gadget, message)``.
    """
    g, params = meta["graph"], meta["params"]
    delta, metric = params.delta, Metric.parse(meta["metric"])
    failures = []
    bad = find_crossings(bundle)
    if bad:
        failures.append((None, f"not planar: segments {bad[0][0]} and {bad[0][1]} meet"))
    if bundle.n > point_bound(g):
        failures.append((None, f"{bundle.n} points exceed the bound {point_bound(g):.0f}"))

    graph = build_naive(bundle, delta, metric)
    n0 = meta["n_original"]
    for k, e in meta["vertex"].items():
        pts = e["points"]
        found = {(a, b) for i, a in enumerate(pts) for b in pts[i + 2:] if graph.has(a, b)}
        if found != {(e["top"], e["bottom"])}:
            failures.append((("vertex", k), f"expected only the top-bottom shortcut, found {sorted(found)}"))

    for (u, v), e in meta["edge"].items():
        li, su, sv = e["line"], e["shared"][u], e["shared"][v]
        name = ("edge", (u, v))
        for i, j in meta["intended"][name]:
            if not _skip_ok(bundle, li, i, j, delta, metric):
                failures.append((name, f"intended skip {i}-{j} is invalid"))
        if _skip_ok(bundle, li, su, sv, delta, metric):
            failures.append((name, "zigzag can be skipped with both shared points kept"))

    for v, e in meta["neighbourhood"].items():
        name = ("neighbourhood", v)
        for i, j in meta["intended"][name]:
            if not _skip_ok(bundle, e["line"], i, j, delta, metric):
                failures.append((name, f"intended skip {i}-{j} is invalid"))
        if _skip_ok(bundle, e["line"], e["first"], e["last"], delta, metric):
            failures.append((name, "zigzag can be skipped without any shared point"))

    eta = params.eta
    lemma = []
    for p, s1, s2 in meta["crossings"]:
        d1 = math.dist(bundle.point(p), bundle.point(s1))
        d2 = math.dist(bundle.point(p), bundle.point(s2))
        if not (d1 < eta and d2 < eta):
            failures.append((("crossing", p), f"crossing point not within eta of its skip points ({d1}, {d2})"))
        allowed = set(graph.out(s1)) | set(graph.out(s2)) | {s1, s2}
        extra = sorted(set(graph.out(p)) - allowed)
        lemma.append((p, not extra))
        if extra:
            failures.append((("crossing", p), f"new shortcut endpoints {extra}"))
    if any(p < n0 for p, _, _ in meta["crossings"]):
        failures.append((None, "crossing point ids overlap original points"))
    return {"failures": failures, "planar": not bad, "points": bundle.n, "bound": point_bound(g),
            "lemma": lemma}


def intended_solution(g: MidsGraph, mids_set, meta, cheap: bool = True) -> frozenset:
    """Kept points the reduction assigns to a vertex set.

    Vertices in the set keep their whole gadget, the others keep only top and
    bottom; horizontal gadgets keep their end points plus the shared points
    of chosen vertices.  Crossing points are always dropped.

    With ``cheap=False`` an edge gadget with both ends chosen, or a
    neighbourhood gadget with no chosen member, keeps its whole zigzag
    instead of the long skip, so every vertex set maps to a valid solution.
    """
    chosen = set(mids_set)
    bad = [v for v in chosen if not 0 <= v < g.n_hat]
    if bad:
        raise ValueError(f"vertices {bad} not in the graph")
    kept = set()
    for k, e in meta["vertex"].items():
        kept.update(e["points"] if k in chosen else (e["top"], e["bottom"]))
    n0 = meta["n_original"]

    def zigzag(e):
        shared = set(e["shared"].values())
        return [p for p in e["points"] if p < n0 and p not in shared]

    for (u, v), e in meta["edge"].items():
        kept.update((e["first"], e["last"]))
        if not cheap and u in chosen and v in chosen:
            kept.update(zigzag(e))
    for e in meta["neighbourhood"].values():
        kept.update((e["first"], e["last"]))
        if not cheap and not set(e["shared"]) & chosen:
            kept.update(zigzag(e))
    return frozenset(kept)
