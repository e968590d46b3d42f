"""Ordering-quality metrics over a (graph, permutation) pair.

All metrics use the integer bit-width log, log(x) = 1 + floor(log2 x),
i.e. the number of bits needed to write x in binary. This differs from
the real-valued log2 that drives the bisection cost on purpose: the
metrics count bits of an actual delta encoding, the optimizer needs a
smooth surrogate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import bit_length_arr
from .bgraph import BipartiteGraph, PlainGraph
from .permutation import Permutation

NUM_BUCKETS = 64


class ZeroVarianceError(ValueError):
    """Correlation is undefined when either sample has no variance."""


def _sorted_ranks_and_rows(graph: BipartiteGraph, perm: Permutation):
    """Neighbor ranks sorted within each query; rows stay grouped."""
    if perm.n != graph.num_data:
        raise ValueError(
            f"permutation covers {perm.n} vertices, graph has {graph.num_data}"
        )
    deg = graph.query_degrees()
    rows = np.repeat(np.arange(graph.num_queries, dtype=np.int64), deg)
    ranks = perm.rank[graph.q_indices]
    order = np.lexsort((ranks, rows))
    return ranks[order], rows


def _gaps(graph: BipartiteGraph, perm: Permutation) -> np.ndarray:
    """All consecutive-neighbor rank gaps, over every query with degree >= 2."""
    sorted_ranks, rows = _sorted_ranks_and_rows(graph, perm)
    if len(sorted_ranks) < 2:
        return np.zeros(0, dtype=np.int64)
    same_row = rows[1:] == rows[:-1]
    return np.diff(sorted_ranks)[same_row]


def loggap(graph: BipartiteGraph, perm: Permutation) -> tuple[int, float]:
    """(total bits, average bits per gap) of all within-list rank gaps.

    Each query's neighbors are sorted by rank; each positive difference of
    consecutive ranks costs its bit width. Queries of degree <= 1
    contribute nothing, and the leading neighbor costs nothing.
    """
    gaps = _gaps(graph, perm)
    total = int(bit_length_arr(gaps).sum())
    return total, (total / len(gaps) if len(gaps) else 0.0)


def gap_count(graph: BipartiteGraph) -> int:
    """sum over queries of max(degree - 1, 0); permutation-independent."""
    deg = graph.query_degrees()
    return int(np.maximum(deg - 1, 0).sum())


def mloga_cost(graph: PlainGraph, perm: Permutation) -> float:
    """Average bit width of |rank(u) - rank(v)| over the graph's edges.

    Undirected graphs count each edge once; directed graphs average over
    the directed edge set (callers should label which was used).
    """
    if perm.n != graph.num_vertices:
        raise ValueError(
            f"permutation covers {perm.n} vertices, graph has {graph.num_vertices}"
        )
    rows = np.repeat(np.arange(graph.num_vertices, dtype=np.int64), np.diff(graph.indptr))
    cols = graph.indices.astype(np.int64)
    if not graph.directed:
        sel = cols > rows
        rows, cols = rows[sel], cols[sel]
    if len(rows) == 0:
        return 0.0
    spans = np.abs(perm.rank[rows] - perm.rank[cols])
    return float(bit_length_arr(spans).sum() / len(rows))


@dataclass
class GapHistogram:
    """Gap counts bucketed by floor(log2 gap): bucket i holds [2^i, 2^(i+1))."""

    buckets: np.ndarray

    @classmethod
    def empty(cls) -> "GapHistogram":
        return cls(np.zeros(NUM_BUCKETS, dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.buckets.sum())

    def to_list(self) -> list[int]:
        return [int(b) for b in self.buckets]


def gap_histogram(graph: BipartiteGraph, perm: Permutation) -> GapHistogram:
    gaps = _gaps(graph, perm)
    if len(gaps) == 0:
        return GapHistogram.empty()
    buckets = np.bincount(bit_length_arr(gaps) - 1, minlength=NUM_BUCKETS)
    return GapHistogram(buckets.astype(np.int64))


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("inputs must be 1-d and equally long")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0 or vy == 0.0:
        raise ZeroVarianceError("correlation undefined for constant input")
    return float((dx @ dy) / np.sqrt(vx * vy))


@dataclass
class OrderingReport:
    """Everything measured for one (graph, permutation) pair."""

    loggap_total: int
    loggap_avg: float
    log_avg: float | None
    histogram: GapHistogram
    bits_per_edge: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "loggap_total": self.loggap_total,
            "loggap_avg": self.loggap_avg,
            "log_avg": self.log_avg,
            "histogram": self.histogram.to_list(),
            "bits_per_edge": dict(self.bits_per_edge),
        }
        return out


def build_report(
    graph: BipartiteGraph,
    perm: Permutation,
    codecs: tuple = (),
    plain: PlainGraph | None = None,
    include_list_metadata: bool = False,
) -> OrderingReport:
    """Assemble LogGap, optional Log, the gap histogram, and codec sizes."""
    from .codecs import bits_per_edge  # local import: codecs is standalone

    total, avg = loggap(graph, perm)
    report = OrderingReport(
        loggap_total=total,
        loggap_avg=avg,
        log_avg=mloga_cost(plain, perm) if plain is not None else None,
        histogram=gap_histogram(graph, perm),
    )
    for name in codecs:
        report.bits_per_edge[name] = bits_per_edge(
            graph, perm, name, include_list_metadata=include_list_metadata
        )
    return report
