"""Integer-list codecs and real compressed-size accounting.

Four encoders for strictly increasing id lists, each with an exact decoder
and a closed-form (or recursion-only) size path used when only bit counts
are needed:

* varbyte: first element then gaps, each as big-endian 7-bit groups with a
  continuation flag (0x80) on every byte but the last.
* gamma: first element plus one, then gaps; Elias gamma, i.e. value N with
  L = floor(log2 N) written as L zero bits then the L+1-bit binary of N.
* ef: plain Elias-Fano over the whole list. With k elements in a universe
  of size U, each value splits into l = max(0, floor(log2(U/k))) low bits
  and a high part; high parts are a bit array of k + (U >> l) + 1 bits
  with bit (value >> l) + i set for the i-th element, followed by the k
  packed l-bit low parts.
* bic: binary interpolative coding. The middle element is written within
  its feasible range with a centered minimal binary code, then the halves
  are encoded recursively (preorder). A range of R values uses codewords
  of b = ceil(log2 R) bits, except that the 2^b - R values nearest the
  middle of the range use b - 1 bits; ranges of one value cost nothing.

Bitstreams are packed most-significant-bit first within bytes and padded
with zero bits to a byte boundary; the pad is excluded from all bit
counts. List length and universe travel out of band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._util import bit_length_arr, find_set_bit, pack_codes, read_bits
from .bgraph import BipartiteGraph
from .permutation import Permutation

CODEC_NAMES = ("varbyte", "gamma", "ef", "bic")


class CodecError(ValueError):
    pass


@dataclass
class EncodedList:
    """One encoded monotone list; length/universe are out-of-band metadata."""

    codec: str
    nbits: int
    payload: bytes
    count: int
    universe: int | None = None


def _check_monotone(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    if values.ndim != 1:
        raise CodecError("expected a 1-d list")
    if values.size:
        if values[0] < 0:
            raise CodecError("values must be nonnegative")
        if np.any(np.diff(values) <= 0):
            raise CodecError("values must be strictly increasing")
    return values


def _delta_symbols(values: np.ndarray, first_offset: int) -> np.ndarray:
    """First element (plus offset) followed by the consecutive gaps."""
    symbols = np.empty(len(values), dtype=np.int64)
    symbols[0] = values[0] + first_offset
    symbols[1:] = np.diff(values)
    return symbols


# --- varbyte ---------------------------------------------------------------


def _varbyte_lengths(symbols: np.ndarray) -> np.ndarray:
    return (np.maximum(bit_length_arr(symbols), 1) + 6) // 7


def encode_gap_varbyte(values) -> EncodedList:
    values = _check_monotone(values)
    if len(values) == 0:
        return EncodedList("varbyte", 0, b"", 0)
    symbols = _delta_symbols(values, 0)
    nbytes = _varbyte_lengths(symbols)
    total = int(nbytes.sum())
    buf = np.zeros(total, dtype=np.uint8)
    offsets = np.cumsum(nbytes) - nbytes
    for j in range(int(nbytes.max())):
        sel = nbytes > j
        group = (symbols[sel] >> (7 * (nbytes[sel] - 1 - j))) & 0x7F
        more = (j < nbytes[sel] - 1).astype(np.uint8) << 7
        buf[offsets[sel] + j] = group.astype(np.uint8) | more
    return EncodedList("varbyte", total * 8, buf.tobytes(), len(values))


def decode_gap_varbyte(enc: EncodedList) -> np.ndarray:
    if enc.count == 0:
        return np.zeros(0, dtype=np.int64)
    b = np.frombuffer(enc.payload, dtype=np.uint8)[: enc.nbits // 8]
    ends = np.flatnonzero((b & 0x80) == 0)
    if len(ends) != enc.count:
        raise CodecError(f"expected {enc.count} symbols, payload holds {len(ends)}")
    starts = np.concatenate([[0], ends[:-1] + 1])
    lens = ends - starts + 1
    symbols = np.zeros(enc.count, dtype=np.int64)
    for j in range(int(lens.max())):
        sel = lens > j
        symbols[sel] = (symbols[sel] << 7) | (b[starts[sel] + j] & 0x7F)
    return np.cumsum(symbols)


def varbyte_size_bits(values) -> int:
    values = _check_monotone(values)
    if len(values) == 0:
        return 0
    return int(_varbyte_lengths(_delta_symbols(values, 0)).sum()) * 8


# --- gamma -----------------------------------------------------------------


def _gamma_widths(symbols: np.ndarray) -> np.ndarray:
    return 2 * bit_length_arr(symbols) - 1


def encode_gap_gamma(values) -> EncodedList:
    """Gamma-coded deltas; the first element is stored as value + 1."""
    values = _check_monotone(values)
    if len(values) == 0:
        return EncodedList("gamma", 0, b"", 0)
    symbols = _delta_symbols(values, 1)
    payload, nbits = pack_codes(symbols, _gamma_widths(symbols))
    return EncodedList("gamma", nbits, payload, len(values))


def decode_gap_gamma(enc: EncodedList) -> np.ndarray:
    if enc.count == 0:
        return np.zeros(0, dtype=np.int64)
    buf = enc.payload + b"\x00" * 8
    symbols = np.empty(enc.count, dtype=np.int64)
    pos = 0
    for i in range(enc.count):
        one = find_set_bit(buf, pos, enc.nbits)
        if one >= enc.nbits:
            raise CodecError("gamma payload exhausted early")
        zeros = one - pos
        symbols[i] = read_bits(buf, one, zeros + 1)
        pos = one + zeros + 1
    out = np.cumsum(symbols)
    out[0:] -= 1  # first symbol was stored as value + 1
    return out


def gamma_size_bits(values) -> int:
    values = _check_monotone(values)
    if len(values) == 0:
        return 0
    return int(_gamma_widths(_delta_symbols(values, 1)).sum())


# --- Elias-Fano ------------------------------------------------------------


def _ef_low_width(count: int, universe: int) -> int:
    if universe <= count:
        return 0
    return int(universe // count).bit_length() - 1


def encode_elias_fano(values, universe: int) -> EncodedList:
    values = _check_monotone(values)
    universe = int(universe)
    if len(values) == 0:
        return EncodedList("ef", 0, b"", 0, universe)
    if values[-1] >= universe:
        raise CodecError(f"max value {values[-1]} not below universe {universe}")
    k = len(values)
    l = _ef_low_width(k, universe)
    high_len = k + (universe >> l) + 1
    total = high_len + k * l
    bits = np.zeros(total, dtype=np.uint8)
    bits[(values >> l) + np.arange(k, dtype=np.int64)] = 1
    if l:
        lows = values & ((1 << l) - 1)
        w = np.full(k, l, dtype=np.int64)
        rep = np.repeat(lows.astype(np.uint64), l)
        shifts = (np.repeat(w, l) - 1 - (np.arange(k * l) % l)).astype(np.uint64)
        bits[high_len:] = ((rep >> shifts) & np.uint64(1)).astype(np.uint8)
    return EncodedList("ef", total, np.packbits(bits).tobytes(), k, universe)


def decode_elias_fano(enc: EncodedList) -> np.ndarray:
    if enc.count == 0:
        return np.zeros(0, dtype=np.int64)
    k, universe = enc.count, int(enc.universe)
    l = _ef_low_width(k, universe)
    high_len = k + (universe >> l) + 1
    bits = np.unpackbits(np.frombuffer(enc.payload, dtype=np.uint8), count=enc.nbits)
    ones = np.flatnonzero(bits[:high_len])
    if len(ones) != k:
        raise CodecError(f"expected {k} high bits, found {len(ones)}")
    highs = ones - np.arange(k, dtype=np.int64)
    if l == 0:
        return highs
    lows = (
        bits[high_len : high_len + k * l].reshape(k, l).astype(np.int64)
        @ (1 << np.arange(l - 1, -1, -1, dtype=np.int64))
    )
    return (highs << l) | lows


def elias_fano_size_bits(count: int, universe: int) -> int:
    if count == 0:
        return 0
    l = _ef_low_width(count, universe)
    return count * (l + 1) + (int(universe) >> l) + 1


# --- binary interpolative --------------------------------------------------


def _cmb_params(span: int) -> tuple[int, int, int]:
    """(width b, short-code count d, rotation m) for a range of `span` values."""
    b = (span - 1).bit_length()
    d = (1 << b) - span
    m = (span - d) // 2
    return b, d, m


def _bic_walk(values: np.ndarray, universe: int, emit):
    """Preorder traversal calling emit(code_value, width) per element."""
    if len(values) == 0:
        return
    stack = [(0, len(values), 0, universe - 1)]
    while stack:
        i, j, vlo, vhi = stack.pop()
        if i >= j:
            continue
        mid = i + (j - i) // 2
        v = int(values[mid])
        lo_v = vlo + (mid - i)
        hi_v = vhi - (j - mid - 1)
        span = hi_v - lo_v + 1
        b, d, m = _cmb_params(span)
        if b:
            x = (v - lo_v - m) % span
            if x < d:
                emit(x, b - 1)
            else:
                emit(x + d, b)
        stack.append((mid + 1, j, v + 1, vhi))
        stack.append((i, mid, vlo, v - 1))


def encode_interpolative(values, universe: int) -> EncodedList:
    values = _check_monotone(values)
    universe = int(universe)
    if len(values) == 0:
        return EncodedList("bic", 0, b"", 0, universe)
    if values[-1] >= universe:
        raise CodecError(f"max value {values[-1]} not below universe {universe}")
    codes: list[int] = []
    widths: list[int] = []

    def emit(code, width):
        codes.append(code)
        widths.append(width)

    _bic_walk(values, universe, emit)
    payload, nbits = pack_codes(
        np.array(codes, dtype=np.uint64), np.array(widths, dtype=np.int64)
    )
    return EncodedList("bic", nbits, payload, len(values), universe)


def decode_interpolative(enc: EncodedList) -> np.ndarray:
    if enc.count == 0:
        return np.zeros(0, dtype=np.int64)
    buf = enc.payload + b"\x00" * 8
    out = np.empty(enc.count, dtype=np.int64)
    pos = 0
    stack = [(0, enc.count, 0, int(enc.universe) - 1)]
    while stack:
        i, j, vlo, vhi = stack.pop()
        if i >= j:
            continue
        mid = i + (j - i) // 2
        lo_v = vlo + (mid - i)
        hi_v = vhi - (j - mid - 1)
        span = hi_v - lo_v + 1
        b, d, m = _cmb_params(span)
        if b == 0:
            x = 0
        else:
            y = read_bits(buf, pos, b - 1)
            if y < d:
                x = y
                pos += b - 1
            else:
                x = read_bits(buf, pos, b) - d
                pos += b
        v = lo_v + (x + m) % span
        out[mid] = v
        stack.append((mid + 1, j, v + 1, vhi))
        stack.append((i, mid, vlo, v - 1))
    return out


def interpolative_size_bits(values, universe: int) -> int:
    values = _check_monotone(values)
    total = 0

    def emit(code, width):
        nonlocal total
        total += width

    _bic_walk(values, int(universe), emit)
    return total


# --- dispatch and graph-level accounting ------------------------------------

_DECODERS = {
    "varbyte": decode_gap_varbyte,
    "gamma": decode_gap_gamma,
    "ef": decode_elias_fano,
    "bic": decode_interpolative,
}


def encode(values, codec: str, universe: int | None = None) -> EncodedList:
    if codec == "varbyte":
        return encode_gap_varbyte(values)
    if codec == "gamma":
        return encode_gap_gamma(values)
    if codec == "ef":
        return encode_elias_fano(values, universe)
    if codec == "bic":
        return encode_interpolative(values, universe)
    raise CodecError(f"unknown codec {codec!r}")


def decode(enc: EncodedList) -> np.ndarray:
    try:
        return _DECODERS[enc.codec](enc)
    except KeyError:
        raise CodecError(f"unknown codec {enc.codec!r}") from None


def _metadata_bits(count: int, universe: int) -> int:
    """Header cost when requested: varbyte-coded count and universe."""
    cost = 0
    for x in (count, universe):
        cost += 8 * ((max(int(x).bit_length(), 1) + 6) // 7)
    return cost


def bits_per_edge(
    graph: BipartiteGraph,
    perm: Permutation,
    codec: str,
    include_list_metadata: bool = False,
) -> float:
    """Total encoded bits of every query's rank list, per edge.

    Each query's neighbor list is mapped through the permutation, sorted,
    and encoded with the chosen codec; the universe is the number of data
    vertices. Per-list length/universe metadata is excluded unless
    requested.
    """
    from .metrics import _sorted_ranks_and_rows

    if codec not in CODEC_NAMES:
        raise CodecError(f"unknown codec {codec!r}")
    if graph.num_edges == 0:
        return 0.0
    universe = graph.num_data
    sorted_ranks, rows = _sorted_ranks_and_rows(graph, perm)
    deg = graph.query_degrees()
    nz_deg = deg[deg > 0]

    is_first = np.ones(len(sorted_ranks), dtype=bool)
    is_first[1:] = rows[1:] != rows[:-1]
    gaps = np.diff(sorted_ranks)[~is_first[1:]]

    if codec == "varbyte":
        firsts = sorted_ranks[is_first]
        total = 8 * int(
            _varbyte_lengths(firsts).sum() + _varbyte_lengths(gaps).sum()
        )
    elif codec == "gamma":
        firsts = sorted_ranks[is_first] + 1
        total = int(_gamma_widths(firsts).sum() + _gamma_widths(gaps).sum())
    elif codec == "ef":
        l = bit_length_arr(universe // nz_deg) - 1
        l[universe <= nz_deg] = 0
        total = int((nz_deg * (l + 1) + (universe >> l) + 1).sum())
    else:  # bic
        starts = np.flatnonzero(is_first)
        bounds = np.append(starts, len(sorted_ranks))
        total = 0
        for a, b in zip(bounds[:-1], bounds[1:]):
            total += interpolative_size_bits(sorted_ranks[a:b], universe)

    if include_list_metadata:
        total += sum(_metadata_bits(int(k), universe) for k in nz_deg)
    return total / graph.num_edges
