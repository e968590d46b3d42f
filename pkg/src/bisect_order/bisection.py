"""One bisection step over a range of data-vertex slots.

A bisection splits a contiguous slice of the evolving slot order into two
balanced halves and then iterates pairwise swaps that lower an estimate of
the delta-encoded size of the adjacency lists touching the slice. The
estimate for one side of one query charges each of its neighbors there the
bit width of the expected gap between consecutive neighbors; summed over
both sides and all queries it is

    sum_q  d1(q) * log2(n1 / (d1(q)+1))  +  d2(q) * log2(n2 / (d2(q)+1))

where d1/d2 count the query's neighbors in either half and n1/n2 are the
half sizes. The value can be negative; only differences matter. Move gains
are cost differences with n1 and n2 held fixed, so paired swaps keep the
halves balanced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._util import gather_ranges, segment_sum
from .baselines import bfs_ordering, minhash_ordering
from .bgraph import BipartiteGraph


class InitStrategy(Enum):
    RANDOM = "random"
    NATURAL = "natural"
    BFS = "bfs"
    MINHASH = "minhash"


class DegenerateRangeError(ValueError):
    """Bisection needs at least two slots."""


@dataclass
class PartitionState:
    """Working state of one bisection.

    Positions are slice-local: position p holds data vertex verts[p], and
    side[p] is 0 for the first half (V1) or 1 for the second (V2). Queries
    with no neighbors inside the slice are absent from `queries`; deg1 and
    deg2 are indexed by local query id. Edges are grouped by position:
    position p's edges occupy edge_q[vptr[p]:vptr[p+1]].
    """

    lo: int
    hi: int
    verts: np.ndarray
    side: np.ndarray
    n1: int
    n2: int
    queries: np.ndarray
    deg1: np.ndarray
    deg2: np.ndarray
    edge_q: np.ndarray  # local query id per in-slice edge, position-major
    edge_v: np.ndarray  # local position per in-slice edge
    vptr: np.ndarray  # per-position edge offsets
    id_order: np.ndarray  # positions sorted by ascending vertex id
    _g1: np.ndarray = field(repr=False, default=None)
    _g2: np.ndarray = field(repr=False, default=None)

    @property
    def size(self) -> int:
        return self.hi - self.lo

    def cost_tables(self):
        """Per-degree cost of one side: a * log2(n_side / (a+1)).

        Sized to the largest in-slice query degree plus one so that gain
        lookups at degree+1 stay in range; deg1+deg2 is invariant under
        swaps, so the tables never need rebuilding.
        """
        if self._g1 is None:
            top = int((self.deg1 + self.deg2).max(initial=0)) + 2
            a = np.arange(top, dtype=np.float64)
            self._g1 = a * (np.log2(self.n1) - np.log2(a + 1.0))
            self._g2 = a * (np.log2(self.n2) - np.log2(a + 1.0))
        return self._g1, self._g2

    def recount_degrees(self):
        """deg1/deg2 recomputed from scratch (oracle for incremental updates)."""
        nq = len(self.queries)
        on_v1 = self.side[self.edge_v] == 0
        d1 = np.bincount(self.edge_q[on_v1], minlength=nq)
        d2 = np.bincount(self.edge_q[~on_v1], minlength=nq)
        return d1.astype(np.int64), d2.astype(np.int64)


def _order_slice(graph, slots, lo, hi, strategy, seed):
    if strategy == InitStrategy.NATURAL:
        return
    window = slots[lo:hi]
    if strategy == InitStrategy.RANDOM:
        rng = np.random.Generator(np.random.PCG64(seed))
        slots[lo:hi] = window[rng.permutation(hi - lo)]
    elif strategy == InitStrategy.BFS:
        slots[lo:hi] = bfs_ordering(graph, window)
    elif strategy == InitStrategy.MINHASH:
        slots[lo:hi] = minhash_ordering(graph, window, seed=seed)
    else:
        raise ValueError(f"unknown init strategy {strategy!r}")


def init_partition(
    graph: BipartiteGraph,
    slots: np.ndarray,
    lo: int,
    hi: int,
    strategy: InitStrategy = InitStrategy.RANDOM,
    seed: int = 0,
) -> PartitionState:
    """Order slots[lo:hi] by the strategy and split into balanced halves.

    The first floor((hi-lo)/2) positions become V1 and the rest V2. The
    slot array is reordered in place; the returned state snapshots the
    slice and localizes all queries with at least one neighbor inside it.
    """
    size = hi - lo
    if size < 2:
        raise DegenerateRangeError(f"range of {size} slots cannot be bisected")
    _order_slice(graph, slots, lo, hi, strategy, seed)
    verts = slots[lo:hi].copy()
    n1 = size // 2

    side = np.zeros(size, dtype=np.int8)
    side[n1:] = 1

    starts = graph.d_indptr[verts]
    deg = graph.d_indptr[verts + 1] - starts
    edge_global_q = graph.d_indices[gather_ranges(starts, deg)]
    edge_v = np.repeat(np.arange(size, dtype=np.int32), deg)
    vptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(deg, out=vptr[1:])
    queries, edge_q = np.unique(edge_global_q, return_inverse=True)
    edge_q = edge_q.astype(np.int32)
    nq = len(queries)

    on_v1 = side[edge_v] == 0
    deg1 = np.bincount(edge_q[on_v1], minlength=nq).astype(np.int64)
    deg2 = np.bincount(edge_q[~on_v1], minlength=nq).astype(np.int64)
    return PartitionState(
        lo=lo,
        hi=hi,
        verts=verts,
        side=side,
        n1=n1,
        n2=size - n1,
        queries=np.asarray(queries, dtype=np.int64),
        deg1=deg1,
        deg2=deg2,
        edge_q=edge_q,
        edge_v=edge_v,
        vptr=vptr,
        id_order=np.argsort(verts, kind="stable").astype(np.int64),
    )


def partition_cost(state: PartitionState) -> float:
    """Estimated bits to delta-encode the slice under the current split."""
    g1, g2 = state.cost_tables()
    return float(g1[state.deg1].sum() + g2[state.deg2].sum())


def compute_move_gains(state: PartitionState) -> np.ndarray:
    """Cost decrease per position if that vertex alone switched sides.

    Sizes n1/n2 are held fixed. Equivalent to evaluating partition_cost
    before and after the flip; computed from two per-query delta tables
    (one per current side of the mover) summed over each vertex's edges.
    """
    g1, g2 = state.cost_tables()
    d1, d2 = state.deg1, state.deg2
    # d1-1 is only read for queries that do have a V1 neighbor; elsewhere
    # the wrapped table entry is selected away by the edge's side below.
    leave_v1 = (g1[d1] - g1[d1 - 1]) + (g2[d2] - g2[d2 + 1])
    leave_v2 = (g2[d2] - g2[d2 - 1]) + (g1[d1] - g1[d1 + 1])
    on_v1 = state.side[state.edge_v] == 0
    contrib = np.where(on_v1, leave_v1[state.edge_q], leave_v2[state.edge_q])
    gains = segment_sum(contrib, np.diff(state.vptr))
    return gains


def run_swap_iteration(state: PartitionState, gains: np.ndarray) -> int:
    """Pair off the best movers from each side and swap while profitable.

    Both sides are sorted by descending gain (ties by ascending vertex id)
    and walked in lockstep; pair i is exchanged when its gain sum is
    positive, and the walk stops at the first non-positive pair. Gains are
    not refreshed between swaps. Degree counters are updated incrementally;
    n1 and n2 never change. Returns the number of swapped pairs.
    """
    # one stable sort of -gains in ascending-id order realizes the
    # (gain desc, id asc) total order for both sides at once
    by_id = state.id_order
    ranked = by_id[np.argsort(-gains[by_id], kind="stable")]
    ranked_sides = state.side[ranked]
    s1 = ranked[ranked_sides == 0]
    s2 = ranked[ranked_sides == 1]
    t = min(len(s1), len(s2))
    if t == 0:
        return 0
    sums = gains[s1[:t]] + gains[s2[:t]]
    nonpos = np.flatnonzero(~(sums > 0))
    k = int(nonpos[0]) if len(nonpos) else t
    if k == 0:
        return 0

    moved_out = s1[:k]  # V1 -> V2
    moved_in = s2[:k]  # V2 -> V1
    state.side[moved_out] = 1
    state.side[moved_in] = 0

    deg = np.diff(state.vptr)
    nq = len(state.queries)
    q_out = state.edge_q[gather_ranges(state.vptr[moved_out], deg[moved_out])]
    q_in = state.edge_q[gather_ranges(state.vptr[moved_in], deg[moved_in])]
    shift = np.bincount(q_in, minlength=nq) - np.bincount(q_out, minlength=nq)
    state.deg1 += shift
    state.deg2 -= shift
    return k


def bisect(
    graph: BipartiteGraph,
    slots: np.ndarray,
    lo: int,
    hi: int,
    strategy: InitStrategy = InitStrategy.RANDOM,
    max_iters: int = 20,
    seed: int = 0,
    record: dict | None = None,
) -> int:
    """Bisect slots[lo:hi] in place; returns the split point.

    Runs gain computation and swap iterations until an iteration swaps
    nothing or `max_iters` is reached, then rearranges the slice so V1
    occupies the left half and V2 the right, each keeping the relative
    order its members had after initialization. The left half always has
    floor((hi-lo)/2) slots. `record`, when given, is filled with the
    per-iteration swap counts and the cost before and after.
    """
    state = init_partition(graph, slots, lo, hi, strategy, seed)
    swap_counts = []
    if record is not None:
        record["cost_before"] = partition_cost(state)
    for _ in range(max_iters):
        gains = compute_move_gains(state)
        swapped = run_swap_iteration(state, gains)
        swap_counts.append(swapped)
        if swapped == 0:
            break
    left = state.verts[state.side == 0]
    right = state.verts[state.side == 1]
    slots[lo : lo + state.n1] = left
    slots[lo + state.n1 : hi] = right
    if record is not None:
        record["cost_after"] = partition_cost(state)
        record["swap_counts"] = swap_counts
    return lo + state.n1
