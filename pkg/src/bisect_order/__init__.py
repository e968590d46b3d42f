"""Compression-friendly reordering of graphs and inverted indexes.

The pipeline: model the input as a query/data bipartite graph, reorder
the data vertices by recursive balanced bisection (or a baseline), then
measure the ordering with logarithmic-gap metrics and real integer
codecs.
"""

__version__ = "0.1.0"

from .baselines import bfs_order, minhash_order, natural_order, random_order
from .bgraph import (
    BipartiteGraph,
    EmptyInputError,
    GraphFormatError,
    PlainGraph,
    ReductionError,
    load_edge_list,
    load_postings,
    read_snapshot,
    to_bipartite_per_edge,
    to_bipartite_per_vertex,
    write_snapshot,
)
from .bisection import (
    DegenerateRangeError,
    InitStrategy,
    PartitionState,
    bisect,
    compute_move_gains,
    init_partition,
    partition_cost,
    run_swap_iteration,
)
from .codecs import (
    CODEC_NAMES,
    CodecError,
    EncodedList,
    bits_per_edge,
    decode,
    encode,
    encode_elias_fano,
    encode_gap_gamma,
    encode_gap_varbyte,
    encode_interpolative,
)
from .metrics import (
    GapHistogram,
    OrderingReport,
    ZeroVarianceError,
    build_report,
    gap_histogram,
    loggap,
    mloga_cost,
    pearson,
)
from .permutation import Permutation
from .reorder import (
    ReorderConfig,
    ReorderTrace,
    default_depth,
    order_stats,
    recursive_bisection,
)

__all__ = [
    "BipartiteGraph",
    "CODEC_NAMES",
    "CodecError",
    "DegenerateRangeError",
    "EmptyInputError",
    "EncodedList",
    "GapHistogram",
    "GraphFormatError",
    "InitStrategy",
    "OrderingReport",
    "PartitionState",
    "Permutation",
    "PlainGraph",
    "ReductionError",
    "ReorderConfig",
    "ReorderTrace",
    "ZeroVarianceError",
    "bfs_order",
    "bisect",
    "bits_per_edge",
    "build_report",
    "compute_move_gains",
    "decode",
    "default_depth",
    "encode",
    "encode_elias_fano",
    "encode_gap_gamma",
    "encode_gap_varbyte",
    "encode_interpolative",
    "gap_histogram",
    "init_partition",
    "load_edge_list",
    "load_postings",
    "loggap",
    "minhash_order",
    "mloga_cost",
    "natural_order",
    "order_stats",
    "partition_cost",
    "pearson",
    "random_order",
    "read_snapshot",
    "recursive_bisection",
    "run_swap_iteration",
    "to_bipartite_per_edge",
    "to_bipartite_per_vertex",
    "write_snapshot",
]
