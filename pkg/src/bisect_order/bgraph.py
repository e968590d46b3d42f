"""Bipartite graph model, text ingestion, reductions, and binary snapshots.

The central structure is a query/data bipartite graph stored CSR-style in
both directions. Plain graphs (edge lists) enter through two reductions:
one query per edge, or one query per vertex. Inverted indexes enter as
posting-list files where terms become queries and documents become data
vertices. Only data vertices are ever reordered.
"""

from __future__ import annotations

import gzip
import io
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SNAPSHOT_MAGIC = b"BISGRPH1"
SNAPSHOT_VERSION = 1


class GraphFormatError(ValueError):
    """Malformed input text (carries a line number or term id when known)."""


class EmptyInputError(ValueError):
    """Input contained no usable records."""


class ReductionError(ValueError):
    """Requested reduction does not apply to this graph."""


def _as_binary_stream(source) -> io.BufferedIOBase:
    if isinstance(source, (str, Path)):
        if str(source).endswith(".gz"):
            return gzip.open(source, "rb")
        return open(source, "rb")
    return source


class BipartiteGraph:
    """Undirected bipartite graph between query and data vertices.

    Adjacency is held CSR-style in both directions; every list is sorted
    and duplicate-free, and the two directions encode the same edge set.
    Instances are immutable after construction and safe for concurrent
    reads.
    """

    __slots__ = ("q_indptr", "q_indices", "d_indptr", "d_indices", "_num_data", "data_labels")

    def __init__(self, q_indptr, q_indices, num_data, data_labels=None, validate=True):
        self.q_indptr = np.ascontiguousarray(q_indptr, dtype=np.int64)
        self.q_indices = np.ascontiguousarray(q_indices, dtype=np.int32)
        self._num_data = int(num_data)
        if data_labels is None:
            data_labels = np.arange(self._num_data, dtype=np.int64)
        self.data_labels = np.ascontiguousarray(data_labels, dtype=np.int64)
        if validate:
            self._check_fwd()
        self.d_indptr, self.d_indices = _transpose_csr(
            self.q_indptr, self.q_indices, self._num_data
        )

    def _check_fwd(self):
        if self.q_indptr[0] != 0 or self.q_indptr[-1] != len(self.q_indices):
            raise ValueError("inconsistent adjacency offsets")
        if np.any(np.diff(self.q_indptr) < 0):
            raise ValueError("offsets must be nondecreasing")
        if self.q_indices.size:
            if self.q_indices.min() < 0 or self.q_indices.max() >= self._num_data:
                raise ValueError("data vertex id out of range")
            # strictly increasing inside each list, any value at boundaries
            interior = np.ones(len(self.q_indices), dtype=bool)
            starts = self.q_indptr[1:-1]
            interior[starts[starts < len(self.q_indices)]] = False
            d = np.diff(self.q_indices.astype(np.int64))
            if np.any(d[interior[1:]] <= 0):
                raise ValueError("adjacency lists must be strictly increasing")
        if len(self.data_labels) != self._num_data:
            raise ValueError("label array size mismatch")

    @property
    def num_queries(self) -> int:
        return len(self.q_indptr) - 1

    @property
    def num_data(self) -> int:
        return self._num_data

    @property
    def num_edges(self) -> int:
        return len(self.q_indices)

    def fwd(self, q: int) -> np.ndarray:
        """Sorted data neighbors of query q (a read-only view)."""
        return self.q_indices[self.q_indptr[q] : self.q_indptr[q + 1]]

    def rev(self, d: int) -> np.ndarray:
        """Sorted query neighbors of data vertex d (a read-only view)."""
        return self.d_indices[self.d_indptr[d] : self.d_indptr[d + 1]]

    def query_degrees(self) -> np.ndarray:
        return np.diff(self.q_indptr)

    def data_degrees(self) -> np.ndarray:
        return np.diff(self.d_indptr)

    def __repr__(self):
        return (
            f"BipartiteGraph(queries={self.num_queries}, data={self.num_data}, "
            f"edges={self.num_edges})"
        )


def _transpose_csr(indptr, indices, num_cols):
    """Column-wise CSR of the same edge set; lists come out sorted."""
    num_rows = len(indptr) - 1
    rows = np.repeat(np.arange(num_rows, dtype=np.int32), np.diff(indptr))
    order = np.argsort(indices, kind="stable")  # stable keeps rows ascending per column
    counts = np.bincount(indices, minlength=num_cols) if len(indices) else np.zeros(num_cols, np.int64)
    t_indptr = np.zeros(num_cols + 1, dtype=np.int64)
    np.cumsum(counts, out=t_indptr[1:])
    return t_indptr, rows[order]


@dataclass
class PlainGraph:
    """Simple graph in compacted id space; adjacency sorted, loop-free."""

    num_vertices: int
    directed: bool
    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray

    def adj(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def num_edges(self) -> int:
        n = len(self.indices)
        return n if self.directed else n // 2


def _compact_first_appearance(flat: np.ndarray):
    """Dense ids by first appearance; returns (ids, labels)."""
    uniq, inverse = np.unique(flat, return_inverse=True)
    first = np.full(len(uniq), len(flat), dtype=np.int64)
    np.minimum.at(first, inverse, np.arange(len(flat), dtype=np.int64))
    by_appearance = np.argsort(first, kind="stable")
    new_id = np.empty(len(uniq), dtype=np.int64)
    new_id[by_appearance] = np.arange(len(uniq), dtype=np.int64)
    return new_id[inverse], uniq[by_appearance]


def _locate_bad_line(data: bytes) -> tuple[int, bytes]:
    """First line that is not a comment, blank, or an integer pair."""
    for i, raw in enumerate(data.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(b"#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            return i, raw
        try:
            int(parts[0])
            int(parts[1])
        except ValueError:
            return i, raw
    return 0, b""


def load_edge_list(source, directed: bool = False) -> PlainGraph:
    """Parse a whitespace-separated "u v" edge list.

    Lines starting with '#' are comments. Vertex ids are compacted to a
    dense 0-based space in first-appearance order (original ids kept in
    `labels`). Self-loops are dropped and duplicate edges deduplicated;
    undirected edges appear in both endpoint lists.
    """
    stream = _as_binary_stream(source)
    data = stream.read()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # loadtxt warns on empty input
            pairs = np.loadtxt(io.BytesIO(data), comments="#", dtype=np.int64, ndmin=2)
    except ValueError:
        lineno, raw = _locate_bad_line(data)
        raise GraphFormatError(
            f"line {lineno}: expected two integers, got {raw.decode(errors='replace')!r}"
        ) from None
    if pairs.size == 0:
        raise EmptyInputError("edge list contains no edges")
    if pairs.shape[1] != 2:
        raise GraphFormatError(f"expected two columns, got {pairs.shape[1]}")

    ids, labels = _compact_first_appearance(pairs.ravel())
    n = len(labels)
    u, v = ids[0::2], ids[1::2]
    keep = u != v  # self-loops dropped
    u, v = u[keep], v[keep]

    if directed:
        keys = np.unique(u * n + v)
        src, dst = keys // n, keys % n
    else:
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        keys = np.unique(lo * n + hi)
        a, b = keys // n, keys % n
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])

    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return PlainGraph(n, directed, indptr, dst.astype(np.int32), labels)


def to_bipartite_per_edge(g: PlainGraph) -> BipartiteGraph:
    """One query per undirected edge, adjacent to the edge's endpoints."""
    if g.directed:
        raise ReductionError("per-edge reduction requires an undirected graph")
    rows = np.repeat(np.arange(g.num_vertices, dtype=np.int64), np.diff(g.indptr))
    cols = g.indices.astype(np.int64)
    sel = cols > rows  # each undirected edge once
    e = int(sel.sum())
    q_indices = np.empty(2 * e, dtype=np.int64)
    q_indices[0::2] = rows[sel]
    q_indices[1::2] = cols[sel]
    q_indptr = np.arange(e + 1, dtype=np.int64) * 2
    return BipartiteGraph(q_indptr, q_indices, g.num_vertices, g.labels)


def to_bipartite_per_vertex(g: PlainGraph) -> BipartiteGraph:
    """One query per vertex whose list is that vertex's (out-)neighbors."""
    return BipartiteGraph(
        g.indptr.copy(), g.indices.copy(), g.num_vertices, g.labels
    )


def load_postings(source, min_list_len: int = 0) -> BipartiteGraph:
    """Parse posting lists: each line is a term id then increasing doc ids.

    Lists with fewer than `min_list_len` documents are skipped. Document
    ids are compacted preserving their ascending original order, so the
    natural baseline on the result matches original doc-id order.
    """
    stream = _as_binary_stream(source)
    kept_lists = []
    any_line = False
    for lineno, raw in enumerate(stream.read().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(b"#"):
            continue
        any_line = True
        try:
            vals = np.array(line.split(), dtype=np.int64)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token") from None
        term, docs = int(vals[0]), vals[1:]
        if docs.size and np.any(np.diff(docs) <= 0):
            raise GraphFormatError(
                f"term {term}: doc ids must be strictly increasing"
            )
        if len(docs) >= min_list_len:
            kept_lists.append(docs)
    if not any_line:
        raise EmptyInputError("postings input contains no lists")

    lengths = np.array([len(d) for d in kept_lists], dtype=np.int64)
    flat = (
        np.concatenate(kept_lists) if kept_lists else np.zeros(0, dtype=np.int64)
    )
    labels = np.unique(flat)
    ids = np.searchsorted(labels, flat)
    q_indptr = np.zeros(len(kept_lists) + 1, dtype=np.int64)
    np.cumsum(lengths, out=q_indptr[1:])
    return BipartiteGraph(q_indptr, ids, len(labels), labels)


# --- binary snapshot -------------------------------------------------------
#
# Layout (all little-endian):
#   magic               8 bytes  "BISGRPH1"
#   version             u32
#   num_queries         u64
#   num_data            u64
#   num_edges           u64
#   q_indptr            (num_queries + 1) x u64
#   q_indices           num_edges x u32

_HEADER = struct.Struct("<8sIQQQ")


def write_snapshot(graph: BipartiteGraph, path) -> None:
    if graph.num_data > 0xFFFFFFFF:
        raise ValueError("snapshot ids are u32; graph too large")
    with open(path, "wb") as f:
        f.write(
            _HEADER.pack(
                SNAPSHOT_MAGIC,
                SNAPSHOT_VERSION,
                graph.num_queries,
                graph.num_data,
                graph.num_edges,
            )
        )
        f.write(graph.q_indptr.astype("<u8").tobytes())
        f.write(graph.q_indices.astype("<u4").tobytes())


def read_snapshot(path, data_labels=None) -> BipartiteGraph:
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise GraphFormatError("snapshot truncated")
        magic, version, nq, nd, ne = _HEADER.unpack(head)
        if magic != SNAPSHOT_MAGIC:
            raise GraphFormatError("not a graph snapshot (bad magic)")
        if version != SNAPSHOT_VERSION:
            raise GraphFormatError(f"unsupported snapshot version {version}")
        raw_indptr = f.read(8 * (nq + 1))
        raw_indices = f.read(4 * ne)
        if len(raw_indptr) != 8 * (nq + 1) or len(raw_indices) != 4 * ne:
            raise GraphFormatError("snapshot truncated")
        indptr = np.frombuffer(raw_indptr, dtype="<u8").astype(np.int64)
        indices = np.frombuffer(raw_indices, dtype="<u4").astype(np.int32)
    return BipartiteGraph(indptr, indices, nd, data_labels)


def write_labels(labels: np.ndarray, path) -> None:
    """Sidecar with one original data-vertex label per line."""
    with open(path, "wb") as f:
        for v in labels:
            f.write(b"%d\n" % int(v))


def read_labels(path) -> np.ndarray:
    with open(path, "rb") as f:
        return np.array([int(x) for x in f.read().split()], dtype=np.int64)
