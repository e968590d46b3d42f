"""Baseline orderings: natural, seeded random, BFS, and minhash shingles.

Each public function returns a full Permutation. The *_ordering variants
order an arbitrary subset of data vertices and are reused to initialize
individual bisection steps.
"""

from __future__ import annotations

import numpy as np

from ._util import gather_ranges, hash_multipliers, mix_u64, segment_min
from .bgraph import BipartiteGraph
from .permutation import Permutation

U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)


def natural_order(graph: BipartiteGraph) -> Permutation:
    """Identity over the loaded id space."""
    return Permutation.identity(graph.num_data)


def random_order(n: int, seed: int) -> Permutation:
    """Seeded uniform shuffle."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return Permutation.from_order(rng.permutation(n))


def bfs_order(graph: BipartiteGraph) -> Permutation:
    """Rank data vertices by first visit time of a breadth-first traversal.

    The traversal alternates data and query layers (the bipartite graph has
    no data-data edges) and restarts from the lowest-id unvisited data
    vertex for each component.
    """
    return Permutation.from_order(bfs_ordering(graph))


def minhash_order(graph: BipartiteGraph, k: int = 10, seed: int = 0) -> Permutation:
    """Lexicographic order of k minwise hashes of each adjacency set."""
    return Permutation.from_order(minhash_ordering(graph, k=k, seed=seed))


def _first_occurrence(values: np.ndarray) -> np.ndarray:
    """Unique values in order of first occurrence."""
    _, idx = np.unique(values, return_index=True)
    return values[np.sort(idx)]


def bfs_ordering(graph: BipartiteGraph, subset: np.ndarray | None = None) -> np.ndarray:
    """BFS visit order of `subset` (all data vertices when None).

    Only subset members are visited and emitted; queries are expanded at
    most once per call. Restarts scan unvisited subset members in
    ascending id order.
    """
    n = graph.num_data
    if subset is None:
        member = np.ones(n, dtype=bool)
        scan = np.arange(n, dtype=np.int64)
    else:
        subset = np.asarray(subset, dtype=np.int64)
        member = np.zeros(n, dtype=bool)
        member[subset] = True
        scan = np.sort(subset)

    visited_d = ~member  # non-members count as visited
    visited_q = np.zeros(graph.num_queries, dtype=bool)
    out = np.empty(len(scan), dtype=np.int64)
    filled = 0

    for start in scan:
        if visited_d[start]:
            continue
        frontier = np.array([start], dtype=np.int64)
        visited_d[start] = True
        while frontier.size:
            out[filled : filled + len(frontier)] = frontier
            filled += len(frontier)
            # data layer -> query layer
            d_start = graph.d_indptr[frontier]
            qs = graph.d_indices[
                gather_ranges(d_start, graph.d_indptr[frontier + 1] - d_start)
            ]
            qs = _first_occurrence(qs[~visited_q[qs]]) if qs.size else qs
            visited_q[qs] = True
            # query layer -> data layer
            q_start = graph.q_indptr[qs]
            ds = graph.q_indices[
                gather_ranges(q_start, graph.q_indptr[qs + np.int64(1)] - q_start)
            ].astype(np.int64)
            if ds.size:
                ds = ds[~visited_d[ds]]
                ds = _first_occurrence(ds)
            visited_d[ds] = True
            frontier = ds
    return out


def minhash_signatures(
    graph: BipartiteGraph, subset: np.ndarray, k: int, seed: int
) -> np.ndarray:
    """(len(subset), k) matrix of minwise hashes of the query adjacency sets.

    Component i of a vertex's signature is the minimum of hash function i
    over its adjacent query ids; vertices with no queries get all-max
    sentinels so they sort last.
    """
    subset = np.asarray(subset, dtype=np.int64)
    sig = np.empty((len(subset), k), dtype=np.uint64)
    starts = graph.d_indptr[subset]
    deg = graph.d_indptr[subset + 1] - starts
    qs = graph.d_indices[gather_ranges(starts, deg)].astype(np.uint64)
    for i, mult in enumerate(hash_multipliers(seed, k)):
        sig[:, i] = segment_min(mix_u64(qs, mult), deg, U64_MAX)
    return sig


def minhash_ordering(
    graph: BipartiteGraph,
    subset: np.ndarray | None = None,
    k: int = 10,
    seed: int = 0,
) -> np.ndarray:
    """Subset sorted lexicographically by minhash signature, ties by id."""
    if subset is None:
        subset = np.arange(graph.num_data, dtype=np.int64)
    else:
        subset = np.asarray(subset, dtype=np.int64)
    if k == 0 or len(subset) == 0:
        return np.sort(subset)
    sig = minhash_signatures(graph, subset, k, seed)
    keys = [subset] + [sig[:, i] for i in range(k - 1, -1, -1)]
    return subset[np.lexsort(keys)]
