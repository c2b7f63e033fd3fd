"""Command line front end: ``polybundle <command> ...``.

Exit codes: 0 success, 2 validation failure, 3 unreadable input.
Result rows use the CSV header ``algo,delta,delta_f,ratio,n,ell,size,time_ms``;
``--no-timing`` writes 0 for the time so that output is byte-identical
between runs.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bca import bca_simplify
from .decomposition import simplify_general
from .geometry import Bundle, Metric
from .instances_io import (
    BundleParseError,
    GadgetError,
    GadgetParams,
    GraphParseError,
    MidsGraph,
    gen_gadget_instance,
    gen_general_bundle,
    gen_tree_bundle,
    ingest_gtfs,
    read_bundle,
    read_graph,
    read_kept,
    road_grid_graph,
    write_bundle,
    write_kept,
)
from .tree_bundle import TreeBundleError, simplify_tree, validate_ptb
from .verify import CSV_HEADER, brute_force_pbs, csv_row, validate_simplification

log = logging.getLogger("polybundle")

EXIT_OK, EXIT_INVALID, EXIT_PARSE = 0, 2, 3


class InputError(Exception):
    """Unreadable or malformed input; mapped to exit code 3."""


@dataclass
class ResultRow:
    algo: str
    delta: float
    delta_f: float
    n: int
    ell: int
    size: int
    time_ms: float

    @property
    def ratio(self) -> float:
        return self.delta_f / self.delta if self.delta > 0 else float("nan")

    def csv(self) -> str:
        return csv_row(self.algo, self.delta, self.delta_f, self.n, self.ell, self.size, self.time_ms)


def _read_text(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load(path) -> Bundle:
    try:
        return read_bundle(_read_text(path))
    except BundleParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _timed(fn, repeat: int):
    """Run ``fn`` ``repeat`` times; returns the last result and the median time in ms."""
    times, result = [], None
    for _ in range(max(1, repeat)):
        t0 = time.perf_counter()
        result = fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    return result, statistics.median(times)


def _row(algo, delta, result, bundle, ms, timing=True) -> ResultRow:
    return ResultRow(algo, delta, result.delta_f or 0.0, bundle.n, bundle.ell, result.size,
                     ms if timing else 0.0)


def _emit(args, row: ResultRow, extra: str = "") -> None:
    if args.csv:
        sys.stdout.write(CSV_HEADER + "\n" + row.csv() + "\n")
    else:
        sys.stdout.write(f"{row.algo}: |S|={row.size} of n={row.n}, ell={row.ell}, delta={row.delta:g}, "
                         f"delta_F={row.delta_f:.6g} (ratio {row.ratio:.4f}), {row.time_ms:.1f} ms{extra}\n")


def _save_kept(args, result, algo) -> None:
    if args.out:
        _write(args.out, write_kept(result.kept, f"{algo} delta={args.delta!r} size={result.size}"))


# ---------------------------------------------------------------- commands

def cmd_simplify_tree(args) -> int:
    bundle = _load(args.input)
    report = validate_ptb(bundle)
    if not report:
        sys.stderr.write(f"not a tree bundle: {report.reason}\n")
        return EXIT_INVALID
    result, ms = _timed(lambda: simplify_tree(bundle, args.delta, args.metric), args.repeat)
    _save_kept(args, result, "dp")
    _emit(args, _row("dp", args.delta, result, bundle, ms, not args.no_timing))
    return EXIT_OK


def cmd_simplify(args) -> int:
    bundle = _load(args.input)
    result, ms = _timed(lambda: simplify_general(bundle, args.delta, args.metric, jobs=args.jobs), args.repeat)
    dec = result.extra["decomposition"]
    sys.stderr.write(f"decomposition: |D|={len(dec.d_set)} components={len(dec.components)}\n")
    _save_kept(args, result, "tbd+dp")
    _emit(args, _row("tbd+dp", args.delta, result, bundle, ms, not args.no_timing))
    return EXIT_OK


def cmd_bca(args) -> int:
    bundle = _load(args.input)
    result, ms = _timed(lambda: bca_simplify(bundle, args.delta, halve=args.halve), args.repeat)
    algo = "bca-half" if args.halve else "bca"
    _save_kept(args, result, algo)
    _emit(args, _row(algo, args.delta, result, bundle, ms, not args.no_timing))
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .verify import achieved_distances
    from .tree_bundle import Simplification

    bundle = _load(args.input)
    try:
        kept, ms = _timed(lambda: brute_force_pbs(bundle, args.delta, args.metric, cap=args.cap), args.repeat)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_INVALID
    result = Simplification(kept, distances=achieved_distances(bundle, kept, args.metric))
    _save_kept(args, result, "oracle")
    _emit(args, _row("oracle", args.delta, result, bundle, ms, not args.no_timing))
    return EXIT_OK


def cmd_validate(args) -> int:
    bundle = _load(args.input)
    if args.kept is None:
        report = validate_ptb(bundle)
        if report:
            sys.stdout.write(f"tree bundle: n={bundle.n} ell={bundle.ell}\n")
            return EXIT_OK
        sys.stdout.write(f"not a tree bundle: {report.reason}\n")
        return EXIT_INVALID
    if args.delta is None:
        raise InputError("--delta is required with --kept")
    try:
        kept = read_kept(_read_text(args.kept))
    except BundleParseError as exc:
        raise InputError(f"{args.kept}: {exc}") from None
    try:
        report = validate_simplification(bundle, kept, args.delta * args.factor, args.metric)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    worst = report.worst[2] if report.worst else 0.0
    sys.stdout.write(f"valid={str(report.valid).lower()} size={len(kept)} threshold={args.delta * args.factor:g} "
                     f"max_distance={worst:.6g}\n")
    if report.missing_endpoints:
        sys.stdout.write(f"missing endpoints: {report.missing_endpoints}\n")
    if report.failing:
        li, (a, b) = report.failing
        sys.stdout.write(f"first failing shortcut: line {li}, {a}-{b}\n")
    return EXIT_OK if report.valid else EXIT_INVALID


def _grid_shape(text: str):
    try:
        r, c = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}") from None
    return r, c


def _graph_from(args):
    if args.graph:
        try:
            return read_graph(_read_text(args.graph))
        except GraphParseError as exc:
            raise InputError(f"{args.graph}: {exc}") from None
    r, c = args.road_grid
    return road_grid_graph(r, c, seed=args.seed)


def _generate(args, seed):
    graph = _graph_from(args)
    try:
        if args.trees > 1:
            return gen_general_bundle(graph, sizes=args.size, seed=seed, count=args.trees)
        return gen_tree_bundle(graph, root=args.root, size=args.size, seed=seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_gen_tree(args) -> int:
    _write(args.out, write_bundle(_generate(args, args.seed)))
    return EXIT_OK


def cmd_ingest(args) -> int:
    try:
        bundle = ingest_gtfs(args.gtfs, snap_radius=args.snap_radius)
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"{args.gtfs}: {exc}") from None
    _write(args.out, write_bundle(bundle))
    return EXIT_OK


def _parse_edges(text: str):
    edges = []
    for tok in filter(None, text.replace(" ", "").split(",")):
        try:
            u, v = (int(x) for x in tok.split("-"))
        except ValueError:
            raise InputError(f"bad edge {tok!r}, expected u-v") from None
        edges.append((u, v))
    return edges


def cmd_gen_gadget(args) -> int:
    if args.edges is not None:
        edges = _parse_edges(args.edges)
    else:
        pairs = [(u, v) for u in range(args.n_hat) for v in range(u + 1, args.n_hat)]
        m = min(len(pairs), int(round(args.c * args.n_hat)))
        edges = sorted(random.Random(args.seed).sample(pairs, m))
    try:
        g = MidsGraph(args.n_hat, tuple(edges))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        bundle, meta = gen_gadget_instance(g, GadgetParams(delta=args.delta, gamma=args.gamma, metric=args.metric))
    except GadgetError as exc:
        sys.stderr.write(f"self-check failed: {exc}\n")
        return EXIT_INVALID
    _write(args.out, write_bundle(bundle))
    rep = meta["report"]
    p = meta["params"]
    sys.stderr.write(
        f"gadget instance: n_hat={g.n_hat} edges={len(g.edges)} points={rep['points']} bound={rep['bound']:.0f} "
        f"planar={rep['planar']} crossings={len(meta['crossings'])} eta={p.eta:.3g} self-check=pass\n")
    if args.meta:
        doc = {
            "n_hat": g.n_hat,
            "edges": [list(e) for e in g.edges],
            "params": {"delta": p.delta, "gamma": p.gamma, "x_spacing": p.x_spacing, "t": p.t, "eta": p.eta},
            "vertex": {str(k): {"line": e["line"], "points": e["points"], "top": e["top"], "bottom": e["bottom"]}
                       for k, e in meta["vertex"].items()},
            "edge": {f"{u}-{v}": {"line": e["line"], "first": e["first"], "last": e["last"],
                                  "shared": {str(k): s for k, s in e["shared"].items()}}
                     for (u, v), e in meta["edge"].items()},
            "neighbourhood": {str(v): {"line": e["line"], "first": e["first"], "last": e["last"],
                                       "shared": {str(k): s for k, s in e["shared"].items()}}
                              for v, e in meta["neighbourhood"].items()},
            "crossings": [list(c) for c in meta["crossings"]],
        }
        _write(args.meta, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- bench

def _delta_grid(args):
    if args.deltas:
        return [float(x) for x in args.deltas.split(",") if x]
    lo, hi, k = args.delta_range.split(":")
    return [float(x) for x in np.linspace(float(lo), float(hi), int(k))]


def _bench_task(task):
    bundle, algo, delta, metric, repeat, timing = task
    if algo == "dp":
        if validate_ptb(bundle):
            fn = lambda: simplify_tree(bundle, delta, metric)  # noqa: E731
        else:
            fn = lambda: simplify_general(bundle, delta, metric)  # noqa: E731
    elif algo in ("bca", "bca-half"):
        fn = lambda: bca_simplify(bundle, delta, halve=algo == "bca-half")  # noqa: E731
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    result, ms = _timed(fn, repeat)
    return _row(algo, delta, result, bundle, ms, timing)


def _svg(path, rows) -> None:
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "polybundle"
    fig, ax = plt.subplots(figsize=(6, 4))
    for algo in dict.fromkeys(r.algo for r in rows):
        by_delta = {}
        for r in rows:
            if r.algo == algo:
                by_delta.setdefault(r.delta, []).append(r.size)
        ds = sorted(by_delta)
        ax.plot(ds, [statistics.mean(by_delta[d]) for d in ds], marker="o", label=algo)
    ax.set_xlabel("delta")
    ax.set_ylabel("retained points |S|")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_bench(args) -> int:
    if args.input:
        bundles = [_load(p) for p in args.input]
    else:
        bundles = [_generate(args, args.seed + i) for i in range(args.instances)]
    deltas = _delta_grid(args)
    algos = [a for a in args.algos.split(",") if a]
    tasks = [(b, a, d, args.metric, args.repeat, not args.no_timing) for b in bundles for a in algos for d in deltas]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_task, tasks))
    else:
        rows = [_bench_task(t) for t in tasks]
    text = CSV_HEADER + "\n" + "".join(r.csv() + "\n" for r in rows)
    _write(args.csv, text)
    if args.svg:
        _svg(args.svg, rows)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polybundle", description="Consistent simplification of polyline bundles.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True, metric=True):
        sp.add_argument("--input", required=True, help="bundle file")
        if delta:
            sp.add_argument("--delta", type=float, required=True)
        if metric:
            sp.add_argument("--metric", choices=[m.value for m in Metric], default="frechet")
        sp.add_argument("--out", help="write the kept point ids here")
        sp.add_argument("--csv", action="store_true", help="print a CSV result row")
        sp.add_argument("--repeat", type=int, default=1, help="report the median of this many runs")
        sp.add_argument("--no-timing", action="store_true", help="write 0 as time for reproducible output")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("simplify-tree", help="exact simplification of a tree bundle")
    common(sp)
    sp.set_defaults(func=cmd_simplify_tree)

    sp = sub.add_parser("simplify", help="tree decomposition, then exact simplification per tree")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_simplify)

    sp = sub.add_parser("bca", help="star-cover approximation (Frechet)")
    common(sp, metric=False)
    sp.add_argument("--halve", action="store_true", help="run at delta/2 so the result is valid at delta")
    sp.set_defaults(func=cmd_bca)

    sp = sub.add_parser("oracle", help="exhaustive optimum for small bundles")
    common(sp)
    sp.add_argument("--cap", type=int, default=20, help="maximum number of removable points")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("validate", help="check a kept set, or check that a bundle is a tree bundle")
    sp.add_argument("--input", required=True)
    sp.add_argument("--kept")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--factor", type=float, default=1.0, help="validate at factor * delta (2 for BCA output)")
    sp.add_argument("--metric", choices=[m.value for m in Metric], default="frechet")
    sp.set_defaults(func=cmd_validate)

    def generator(sp):
        sp.add_argument("--graph", help="embedded graph file (nodes:/edges: sections)")
        sp.add_argument("--road-grid", type=_grid_shape, default=(30, 30), metavar="RxC")
        sp.add_argument("--size", type=int, default=100, help="nodes per tree")
        sp.add_argument("--trees", type=int, default=1, help="more than 1 gives a general bundle")
        sp.add_argument("--root", type=int)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("gen-tree", help="generate a tree (or general) bundle from a graph")
    generator(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen_tree)

    sp = sub.add_parser("ingest", help="convert a GTFS shapes.txt into a bundle file")
    sp.add_argument("--gtfs", required=True)
    sp.add_argument("--snap-radius", type=float, default=0.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("gen-gadget", help="planar hardness instance for a small graph")
    sp.add_argument("--n-hat", type=int, required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--edges", help="comma separated u-v pairs")
    g.add_argument("--c", type=float, default=1.0, help="edge density; c * n_hat random edges")
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--metric", choices=[m.value for m in Metric], default="frechet")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.add_argument("--meta", help="write gadget metadata as JSON")
    sp.set_defaults(func=cmd_gen_gadget)

    sp = sub.add_parser("bench", help="sweep delta over bundles and emit CSV (and an SVG chart)")
    sp.add_argument("--input", nargs="*", help="bundle files; generated instances otherwise")
    generator(sp)
    sp.add_argument("--instances", type=int, default=1)
    grid = sp.add_mutually_exclusive_group(required=True)
    grid.add_argument("--deltas", help="comma separated values")
    grid.add_argument("--delta-range", help="LO:HI:COUNT, evenly spaced")
    sp.add_argument("--algos", default="dp,bca")
    sp.add_argument("--metric", choices=[m.value for m in Metric], default="frechet")
    sp.add_argument("--repeat", type=int, default=1)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--no-timing", action="store_true")
    sp.add_argument("--csv", help="output path (stdout by default)")
    sp.add_argument("--svg")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except TreeBundleError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
