"""Shared low-level helpers: deterministic hashing, bit lengths, bit packing.

Everything here is pure integer arithmetic, stable across platforms and
Python processes (no reliance on the salted builtin hash).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 round over a 64-bit state."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Mix integers into a 63-bit seed, independent per distinct tuple."""
    h = 0xC2B2AE3D27D4EB4F
    for p in parts:
        h = splitmix64(h ^ (int(p) & MASK64))
    return h & ((1 << 63) - 1)


def hash_multipliers(seed: int, k: int) -> np.ndarray:
    """k odd 64-bit multipliers derived from a seed (one per hash function)."""
    return np.array(
        [splitmix64(derive_seed(seed, 0x5163, i)) | 1 for i in range(k)],
        dtype=np.uint64,
    )


def mix_u64(values: np.ndarray, multiplier: np.uint64) -> np.ndarray:
    """Multiply-xorshift mix of uint64 values (wraps mod 2**64)."""
    z = (values + np.uint64(1)) * multiplier
    z = z ^ (z >> np.uint64(29))
    z = z * np.uint64(0xBF58476D1CE4E5B9)
    return z ^ (z >> np.uint64(32))


def bit_length_arr(a: np.ndarray) -> np.ndarray:
    """Per-element bit length (1 + floor(log2 x) for x >= 1, 0 for 0).

    Exact for values below 2**53; larger values are rejected rather than
    silently rounded through float64.
    """
    a = np.asarray(a)
    if a.size and int(a.max()) >= (1 << 53):
        raise ValueError("bit_length_arr requires values < 2**53")
    _, exp = np.frexp(a.astype(np.float64))
    return exp.astype(np.int64)


def segmented_arange(lengths: np.ndarray, total: int | None = None) -> np.ndarray:
    """Concatenation of arange(l) for each l in lengths."""
    lengths = np.asarray(lengths, dtype=np.int64)
    if total is None:
        total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    starts = np.cumsum(lengths) - lengths
    return np.arange(total, dtype=np.int64) - np.repeat(starts, lengths)


def gather_ranges(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Concatenation of arange(s, s+l) for each (s, l) pair."""
    lengths = np.asarray(lengths, dtype=np.int64)
    total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    return np.repeat(np.asarray(starts, dtype=np.int64), lengths) + segmented_arange(
        lengths, total
    )


def segment_min(values: np.ndarray, lengths: np.ndarray, fill) -> np.ndarray:
    """Minimum per segment of a concatenated array; `fill` for empty segments."""
    lengths = np.asarray(lengths, dtype=np.int64)
    out = np.full(len(lengths), fill, dtype=values.dtype)
    nonempty = lengths > 0
    if nonempty.any():
        starts = np.cumsum(lengths) - lengths
        out[nonempty] = np.minimum.reduceat(values, starts[nonempty])
    return out


def segment_sum(values: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Sum per segment of a concatenated array; empty segments sum to 0."""
    lengths = np.asarray(lengths, dtype=np.int64)
    out = np.zeros(len(lengths), dtype=values.dtype)
    nonempty = lengths > 0
    if nonempty.any():
        starts = np.cumsum(lengths) - lengths
        out[nonempty] = np.add.reduceat(values, starts[nonempty])
    return out


def pack_codes(values: np.ndarray, widths: np.ndarray) -> tuple[bytes, int]:
    """Pack MSB-first binary fields into a byte payload.

    Field i holds the low widths[i] bits of values[i]; zero-width fields
    emit nothing. Returns (payload, total_bits); payload is padded with
    zero bits to a byte boundary.
    """
    values = np.asarray(values, dtype=np.uint64)
    widths = np.asarray(widths, dtype=np.int64)
    total = int(widths.sum())
    if total == 0:
        return b"", 0
    w_rep = np.repeat(widths, widths)
    offs = segmented_arange(widths, total)
    shifts = (w_rep - 1 - offs).astype(np.uint64)
    bits = ((np.repeat(values, widths) >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits).tobytes(), total


def read_bits(buf: bytes, pos: int, width: int) -> int:
    """Read an MSB-first field of `width` bits at bit offset `pos`."""
    if width == 0:
        return 0
    end = pos + width
    chunk = int.from_bytes(buf[pos >> 3 : (end + 7) >> 3], "big")
    pad = (-end) % 8
    return (chunk >> pad) & ((1 << width) - 1)


def find_set_bit(buf: bytes, pos: int, limit: int) -> int:
    """Index of the first 1 bit at or after `pos`, or `limit` if none."""
    while pos < limit:
        byte = buf[pos >> 3]
        if byte == 0:
            pos = (pos & ~7) + 8
            continue
        if (byte >> (7 - (pos & 7))) & 1:
            return pos
        pos += 1
    return limit
