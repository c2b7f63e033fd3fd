"""Walk through exact simplification of a small tree bundle.

Run with ``python demos/tree_bundle_walkthrough.py``.  Builds a road-grid
tree bundle, prints the kept set size for a few tolerances, and shows that
Hausdorff never keeps more points than Frechet.
"""

from polybundle import simplify_tree, validate_simplification
from polybundle.instances_io import gen_tree_bundle, road_grid_graph


def main():
    graph = road_grid_graph(15, 15, seed=1)
    bundle = gen_tree_bundle(graph, root=112, size=120, seed=2)
    print(f"tree bundle: n={bundle.n} points, {bundle.ell} polylines, "
          f"{len(bundle.endpoints())} endpoints (leaves plus root)")
    print(f"{'delta':>6} {'frechet':>8} {'hausdorff':>10}")
    for delta in (0.05, 0.2, 0.5, 1.0, 3.0, 50.0):
        f = simplify_tree(bundle, delta, "frechet")
        h = simplify_tree(bundle, delta, "hausdorff")
        assert h.size <= f.size
        assert validate_simplification(bundle, f.kept, delta, "frechet")
        print(f"{delta:6g} {f.size:8d} {h.size:10d}")
    # at a huge tolerance only the endpoints remain
    print("kept at 50:", sorted(simplify_tree(bundle, 50.0).kept) == sorted(bundle.endpoints()))


if __name__ == "__main__":
    main()
