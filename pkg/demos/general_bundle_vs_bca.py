"""Compare the decomposition pipeline with the star-cover approximation.

Run with ``python demos/general_bundle_vs_bca.py``.  Two overlapping trees on
one grid make a bundle that is not a tree bundle; it is split into tree
bundles, each solved exactly, and compared with the approximation (valid at
twice the tolerance) and its halved variant (valid at the tolerance).
"""

from polybundle import bca_simplify, greedy_tbd, simplify_general, validate_simplification
from polybundle.instances_io import gen_general_bundle, road_grid_graph


def main():
    graph = road_grid_graph(20, 20, seed=3)
    bundle = gen_general_bundle(graph, roots=[21, 378], sizes=[150, 150], seed=4)
    dec = greedy_tbd(bundle)
    print(f"bundle: n={bundle.n}, ell={bundle.ell}; decomposition: |D|={len(dec.d_set)}, "
          f"{len(dec.components)} tree bundles")
    for delta in (0.2, 0.6):
        exact = simplify_general(bundle, delta, "frechet")
        approx = bca_simplify(bundle, delta)
        halved = bca_simplify(bundle, delta, halve=True)
        assert validate_simplification(bundle, exact.kept, delta, "frechet")
        assert validate_simplification(bundle, approx.kept, 2 * delta, "frechet")
        print(f"delta={delta}: tbd+dp |S|={exact.size} (delta_F/delta {exact.delta_f / delta:.2f}), "
              f"bca |S|={approx.size} ({approx.delta_f / delta:.2f}), "
              f"bca-half |S|={halved.size} ({halved.delta_f / delta:.2f})")


if __name__ == "__main__":
    main()
