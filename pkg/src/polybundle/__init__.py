"""Consistent simplification of polyline bundles.

The main entry points are :func:`simplify_tree` (exact, tree bundles),
:func:`simplify_general` (tree decomposition plus exact per-tree solving) and
:func:`bca_simplify` (star-cover approximation).  :mod:`polybundle.verify`
holds the validators and the exhaustive oracle, :mod:`polybundle.instances_io`
the file formats and instance generators.
"""

from .bca import Star, StarCover, bca_simplify, build_stars
from .decomposition import (
    Component,
    Decomposition,
    DecompositionReport,
    build_union_graph,
    greedy_tbd,
    simplify_general,
    split_lines,
    validate_decomposition,
)
from .geometry import (
    Bundle,
    BundleError,
    Metric,
    frechet_distance,
    frechet_ok,
    hausdorff_distance,
    hausdorff_ok,
    shortcut_ok,
)
from .shortcut_graph import (
    ShortcutGraph,
    build_naive,
    build_tree_hausdorff,
    build_tree_shortcuts,
    chan_chin_shortcuts,
)
from .tree_bundle import (
    Simplification,
    TreeBundleError,
    TreeGraph,
    build_tree_graph,
    dp_table,
    ptbs_dp,
    simplify_tree,
    validate_ptb,
)
from .verify import (
    ValidationReport,
    achieved_distances,
    brute_force_pbs,
    min_link_path,
    validate_simplification,
)

__version__ = "0.1.0"
