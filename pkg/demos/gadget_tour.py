"""Build the planar gadget instance for a path on three vertices.

Run with ``python demos/gadget_tour.py``.  Prints the instance size and the
self-check report, then validates the kept set assigned to every vertex
subset: exactly the independent dominating sets give valid simplifications.
"""

import itertools

from polybundle import validate_simplification
from polybundle.instances_io import MidsGraph, gen_gadget_instance, intended_solution


def main():
    g = MidsGraph(3, ((0, 1), (1, 2)))
    bundle, meta = gen_gadget_instance(g)
    rep = meta["report"]
    print(f"n={bundle.n} (bound {rep['bound']:.0f}), ell={bundle.ell}, planar={rep['planar']}, "
          f"{len(meta['crossings'])} crossing points, self-check failures: {len(rep['failures'])}")
    delta = meta["params"].delta
    for r in range(4):
        for s in itertools.combinations(range(3), r):
            kept = intended_solution(g, s, meta)
            ok = validate_simplification(bundle, kept, delta, meta["metric"], measure=False).valid
            kind = "independent dominating" if g.is_independent(s) and g.is_dominating(s) else ""
            print(f"  {str(set(s) or '{}'):10} |S|={len(kept):4d} valid={ok!s:5} {kind}")


if __name__ == "__main__":
    main()
