"""Permutations of data vertices and their on-disk forms."""

from __future__ import annotations

import struct

import numpy as np

PERM_MAGIC = b"BISPERM1"
PERM_VERSION = 1
_HEADER = struct.Struct("<8sIQ")


class Permutation:
    """Bijection from data-vertex ids to ranks in [0, n)."""

    __slots__ = ("rank", "_order")

    def __init__(self, rank: np.ndarray, validate: bool = True):
        self.rank = np.ascontiguousarray(rank, dtype=np.int64)
        self._order = None
        if validate and not _is_bijection(self.rank):
            raise ValueError("rank array is not a bijection onto [0, n)")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n, dtype=np.int64), validate=False)

    @classmethod
    def from_order(cls, order: np.ndarray) -> "Permutation":
        """Build from a slot array: order[i] is the vertex placed at rank i."""
        order = np.asarray(order, dtype=np.int64)
        rank = np.empty(len(order), dtype=np.int64)
        rank[order] = np.arange(len(order), dtype=np.int64)
        p = cls(rank, validate=False)
        p._order = order.copy()
        return p

    @property
    def n(self) -> int:
        return len(self.rank)

    @property
    def order(self) -> np.ndarray:
        """Inverse view: order[r] is the vertex at rank r."""
        if self._order is None:
            self._order = np.empty(self.n, dtype=np.int64)
            self._order[self.rank] = np.arange(self.n, dtype=np.int64)
        return self._order

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.rank, other.rank)

    def __repr__(self):
        return f"Permutation(n={self.n})"


def _is_bijection(rank: np.ndarray) -> bool:
    n = len(rank)
    if n == 0:
        return True
    if rank.min() < 0 or rank.max() >= n:
        return False
    seen = np.zeros(n, dtype=bool)
    seen[rank] = True
    return bool(seen.all())


def write_permutation_text(perm: Permutation, path, labels=None) -> None:
    """One line per data vertex: "original_label rank", in vertex-id order."""
    if labels is None:
        labels = np.arange(perm.n, dtype=np.int64)
    with open(path, "wb") as f:
        for v in range(perm.n):
            f.write(b"%d %d\n" % (int(labels[v]), int(perm.rank[v])))


def read_permutation_text(path, labels=None) -> Permutation:
    """Inverse of write_permutation_text; `labels` maps vertex id to label."""
    pairs = {}
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f.read().splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith(b"#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'label rank'")
            pairs[int(parts[0])] = int(parts[1])
    if labels is None:
        labels = np.arange(len(pairs), dtype=np.int64)
    if len(labels) != len(pairs):
        raise ValueError(
            f"permutation covers {len(pairs)} vertices, graph has {len(labels)}"
        )
    try:
        rank = np.array([pairs[int(lab)] for lab in labels], dtype=np.int64)
    except KeyError as e:
        raise ValueError(f"permutation is missing label {e.args[0]}") from None
    return Permutation(rank)


def write_permutation_binary(perm: Permutation, path) -> None:
    if perm.n > 0xFFFFFFFF:
        raise ValueError("binary permutation ranks are u32; too large")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(PERM_MAGIC, PERM_VERSION, perm.n))
        f.write(perm.rank.astype("<u4").tobytes())


def read_permutation_binary(path) -> Permutation:
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise ValueError("permutation snapshot truncated")
        magic, version, n = _HEADER.unpack(head)
        if magic != PERM_MAGIC:
            raise ValueError("not a permutation snapshot (bad magic)")
        if version != PERM_VERSION:
            raise ValueError(f"unsupported permutation version {version}")
        raw = f.read(4 * n)
        if len(raw) != 4 * n:
            raise ValueError("permutation snapshot truncated")
        rank = np.frombuffer(raw, dtype="<u4").astype(np.int64)
    return Permutation(rank)
