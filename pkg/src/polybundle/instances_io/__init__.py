"""Reading, writing and generating bundles."""

from .bundle_file import (
    BundleParseError,
    load_bundle,
    read_bundle,
    read_kept,
    save_bundle,
    write_bundle,
    write_kept,
)
from .gadgets import (
    GadgetError,
    GadgetParams,
    MidsGraph,
    check_gadget_instance,
    compute_eta,
    gen_gadget_instance,
    intended_solution,
    point_bound,
)
from .graphs import (
    EmbeddedGraph,
    GraphParseError,
    gen_general_bundle,
    gen_tree_bundle,
    grid_graph,
    read_graph,
    road_grid_graph,
    star_graph,
    write_graph,
)
from .gtfs import REQUIRED_COLUMNS, ingest_gtfs, write_gtfs
from .planarity import bundle_segments, check_planarity, find_crossings
