"""Recursive bisection driver producing a full data-vertex permutation.

The driver keeps one mutable slot array (the evolving inverse permutation)
and repeatedly bisects contiguous slices of it: bisect the full range,
recurse on the two halves, and read the final order left to right. Slices
at different branches touch disjoint slots, so sibling subtrees run
concurrently; results are identical for any worker count because every
slice's outcome depends only on the graph, the slice contents, and a seed
derived from (seed, level, global offset).

Parallel runs use forked worker processes on platforms that support it
(the graph is inherited copy-on-write; slice contents travel to and from
workers), falling back to a thread pool elsewhere. Levels are processed
with a barrier in between: a slice is bisected only after its parent
finished. Slices at or below `seq_threshold` run their whole subtree
inside one worker.
"""

from __future__ import annotations

import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._util import derive_seed
from .bgraph import BipartiteGraph
from .bisection import InitStrategy, bisect
from .permutation import Permutation

DEFAULT_MAX_ITERS = 20
DEFAULT_SEQ_THRESHOLD = 4096
DEPTH_HEADROOM = 5  # levels trimmed off ceil(log2 n); leaves ~32 slots


def default_depth(n: int) -> int:
    """ceil(log2 n) minus headroom, floored at one level."""
    if n < 2:
        return 1
    return max(1, math.ceil(math.log2(n)) - DEPTH_HEADROOM)


@dataclass
class ReorderConfig:
    init_strategy: InitStrategy = InitStrategy.RANDOM
    max_iters: int = DEFAULT_MAX_ITERS
    depth_cutoff: int | None = None  # None: derived from n at run time
    seed: int = 1
    threads: int = 1
    seq_threshold: int = DEFAULT_SEQ_THRESHOLD

    def __post_init__(self):
        if isinstance(self.init_strategy, str):
            self.init_strategy = InitStrategy(self.init_strategy)
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.depth_cutoff is not None and self.depth_cutoff < 1:
            raise ValueError("depth_cutoff must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def resolved_depth(self, n: int) -> int:
        return self.depth_cutoff if self.depth_cutoff is not None else default_depth(n)

    @property
    def parallel(self) -> bool:
        return self.threads > 1


@dataclass
class SliceStats:
    """Outcome of one bisection: where, how long, and what it bought."""

    level: int
    lo: int
    hi: int
    swap_counts: list
    cost_before: float
    cost_after: float

    @property
    def size(self) -> int:
        return self.hi - self.lo

    @property
    def iterations(self) -> int:
        return len(self.swap_counts)

    def swapped_pairs_at(self, iteration: int) -> int:
        """Pairs swapped in the given 0-based iteration (0 once converged)."""
        if iteration < len(self.swap_counts):
            return self.swap_counts[iteration]
        return 0


@dataclass
class ReorderTrace:
    max_depth: int
    slices: list = field(default_factory=list)
    permutation: Permutation | None = None

    def levels(self) -> dict[int, list]:
        out: dict[int, list] = {}
        for s in self.slices:
            out.setdefault(s.level, []).append(s)
        return out

    @property
    def num_levels(self) -> int:
        return len({s.level for s in self.slices})


def _bisect_once(graph, slots, lo, hi, level, config, collect, base=0):
    """One bisection of slots[lo:hi]; `base` maps lo to global coordinates."""
    seed = derive_seed(config.seed, level, base + lo)
    record = {} if collect else None
    mid = bisect(
        graph,
        slots,
        lo,
        hi,
        strategy=config.init_strategy,
        max_iters=config.max_iters,
        seed=seed,
        record=record,
    )
    stat = None
    if collect:
        stat = SliceStats(
            level=level,
            lo=base + lo,
            hi=base + hi,
            swap_counts=record["swap_counts"],
            cost_before=record["cost_before"],
            cost_after=record["cost_after"],
        )
    return mid, stat


def _subtree(graph, slots, lo, hi, level, max_depth, config, collect, stats, base=0):
    """Sequential recursion over one slice and everything below it."""
    if hi - lo < 2 or level >= max_depth:
        return
    mid, stat = _bisect_once(graph, slots, lo, hi, level, config, collect, base)
    if stat is not None:
        stats.append(stat)
    _subtree(graph, slots, lo, mid, level + 1, max_depth, config, collect, stats, base)
    _subtree(graph, slots, mid, hi, level + 1, max_depth, config, collect, stats, base)


# Worker-process environment, inherited through fork before the pool spins
# up. Maps run id -> (graph, config, collect, max_depth).
_WORKER_ENV: dict = {}


def _process_task(spec):
    run_id, lo, hi, level, window = spec
    graph, config, collect, max_depth = _WORKER_ENV[run_id]
    if hi - lo <= config.seq_threshold:
        stats: list = []
        _subtree(
            graph, window, 0, hi - lo, level, max_depth, config, collect, stats, base=lo
        )
        return lo, hi, window, None, stats
    mid, stat = _bisect_once(graph, window, 0, hi - lo, level, config, collect, base=lo)
    return lo, hi, window, lo + mid, [stat] if stat is not None else []


def _run_parallel(graph, config, collect, slots, max_depth, stats):
    """Level-synchronous fork-join over worker processes (or threads)."""
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        ctx = None
    run_id = id(slots)
    _WORKER_ENV[run_id] = (graph, config, collect, max_depth)
    try:
        if ctx is not None:
            pool = ProcessPoolExecutor(max_workers=config.threads, mp_context=ctx)
        else:
            pool = ThreadPoolExecutor(max_workers=config.threads)
        with pool:
            pending = [(0, len(slots), 0)]
            while pending:
                runnable = [
                    (lo, hi, level)
                    for lo, hi, level in pending
                    if hi - lo >= 2 and level < max_depth
                ]
                tasks = [
                    (run_id, lo, hi, level, slots[lo:hi].copy())
                    for lo, hi, level in runnable
                ]
                pending = []
                results = pool.map(_process_task, tasks)
                for (lo, hi, level), (_, _, window, mid, recs) in zip(runnable, results):
                    slots[lo:hi] = window
                    stats.extend(recs)
                    if mid is not None:
                        pending.append((lo, mid, level + 1))
                        pending.append((mid, hi, level + 1))
    finally:
        _WORKER_ENV.pop(run_id, None)


def _run(graph: BipartiteGraph, config: ReorderConfig, collect: bool):
    n = graph.num_data
    slots = np.arange(n, dtype=np.int64)
    trace = ReorderTrace(max_depth=config.resolved_depth(n)) if collect else None
    if n < 2:
        return Permutation.from_order(slots), trace
    max_depth = config.resolved_depth(n)

    stats: list = []
    if not config.parallel:
        _subtree(graph, slots, 0, n, 0, max_depth, config, collect, stats)
    else:
        _run_parallel(graph, config, collect, slots, max_depth, stats)

    if collect:
        stats.sort(key=lambda s: (s.level, s.lo))
        trace.slices = stats
    return Permutation.from_order(slots), trace


def recursive_bisection(graph: BipartiteGraph, config: ReorderConfig | None = None) -> Permutation:
    """Compression-friendly order of the data vertices."""
    perm, _ = _run(graph, config or ReorderConfig(), collect=False)
    return perm


def order_stats(graph: BipartiteGraph, config: ReorderConfig | None = None) -> ReorderTrace:
    """Run the reordering while recording per-slice iteration behavior.

    The trace carries, for every bisected slice, the swap count of each
    iteration and the partition cost before and after; the permutation the
    run produced is attached as `trace.permutation`.
    """
    perm, trace = _run(graph, config or ReorderConfig(), collect=True)
    trace.permutation = perm
    return trace
