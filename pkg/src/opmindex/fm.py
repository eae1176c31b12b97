"""Compressed suffix array over the order component.

The BWT of ``To + 1`` followed by a 0 sentinel is stored in a Huffman-shaped
wavelet tree whose node bitvectors are concatenated into one rank-enabled
bitvector.  Suffixes starting at block boundaries (0-based text position a
multiple of B) are marked; the block number of each marked row is kept in a
bit-packed array ordered by row.

All hot paths are njit kernels taking ``CsaIndex.kernel_args``, a tuple of
arrays; rows are 0-based and ranges are inclusive ``(lo, hi)`` pairs.
"""

from __future__ import annotations

import heapq
import io
import struct
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CorruptIndex, InvalidInput, InvalidSymbol
from .sais import suffix_array
from .transform import Mode, OrderParams

ONE = np.uint64(1)
M1 = np.uint64(0x5555555555555555)
M2 = np.uint64(0x3333333333333333)
M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
H01 = np.uint64(0x0101010101010101)

SUPERBLOCK_SHIFT = 9  # one cumulative count per 512 bits


@dataclass(frozen=True)
class RowRange:
    lo: int
    hi: int

    def __len__(self) -> int:
        return max(0, self.hi - self.lo + 1)

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def rows(self) -> range:
        return range(self.lo, self.hi + 1)


# ---------------------------------------------------------------- bitvectors


@njit(cache=True)
def popcount(x):
    x = x - ((x >> ONE) & M1)
    x = (x & M2) + ((x >> np.uint64(2)) & M2)
    x = (x + (x >> np.uint64(4))) & M4
    return np.int64((x * H01) >> np.uint64(56))


@njit(cache=True)
def rank_samples(words, out):
    count = out.shape[0]
    acc = 0
    per = 1 << (SUPERBLOCK_SHIFT - 6)
    for b in range(count):
        out[b] = acc
        for w in range(b * per, min((b + 1) * per, words.shape[0])):
            acc += popcount(words[w])
    return out


@njit(cache=True)
def rank1(words, samples, i):
    """Number of set bits in positions [0, i)."""
    blk = i >> SUPERBLOCK_SHIFT
    r = np.int64(samples[blk])
    w = blk << (SUPERBLOCK_SHIFT - 6)
    wi = i >> 6
    while w < wi:
        r += popcount(words[w])
        w += 1
    rem = i & 63
    if rem:
        r += popcount(words[wi] & ((ONE << np.uint64(rem)) - ONE))
    return r


@njit(cache=True)
def get_bit(words, i):
    return (words[i >> 6] >> np.uint64(i & 63)) & ONE


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Bool array -> uint64 words, bit i at position i % 64 of word i // 64."""
    packed = np.packbits(bits.astype(np.uint8), bitorder="little")
    pad = (-packed.shape[0]) % 8
    if pad or packed.shape[0] == 0:
        packed = np.concatenate([packed, np.zeros(pad or 8, dtype=np.uint8)])
    return packed.view("<u8").astype(np.uint64)


def make_rank(words: np.ndarray, nbits: int) -> np.ndarray:
    out = np.zeros((nbits >> SUPERBLOCK_SHIFT) + 1, dtype=np.uint64 if nbits >= 2**32 else np.uint32)
    rank_samples(words, out)
    return out


@njit(cache=True)
def packed_get(words, width, i):
    bp = i * width
    wd = bp >> 6
    o = bp & 63
    v = words[wd] >> np.uint64(o)
    if o + width > 64:
        v |= words[wd + 1] << np.uint64(64 - o)
    return np.int64(v & ((ONE << np.uint64(width)) - ONE))


@njit(cache=True)
def _pack_ints(values, width):
    nwords = (values.shape[0] * width + 63) // 64 + 1
    words = np.zeros(nwords, dtype=np.uint64)
    for i in range(values.shape[0]):
        v = np.uint64(values[i])
        bp = i * width
        wd = bp >> 6
        o = bp & 63
        words[wd] |= v << np.uint64(o)
        if o + width > 64:
            words[wd + 1] |= v >> np.uint64(64 - o)
    return words


# ---------------------------------------------------------------- wavelet tree


def huffman_codes(counts: np.ndarray):
    """Canonical-free Huffman tree over the symbols with non-zero count.

    Returns (child, code, length, path): child[node] = (left, right) with
    leaves encoded as ``-(symbol + 1)``; path[c, d] is the internal node
    visited at depth d by symbol c.  Ties are broken by symbol order so the
    shape is deterministic.
    """
    sigma = counts.shape[0]
    heap = []
    serial = 0
    for c in range(sigma):
        if counts[c] > 0:
            heap.append((int(counts[c]), serial, ("leaf", c)))
            serial += 1
    heapq.heapify(heap)
    if len(heap) == 1:
        # a lone symbol still needs one internal node to carry a bitvector
        cnt, _, leaf = heap[0]
        tree = ("node", leaf, None)
    else:
        while len(heap) > 1:
            a = heapq.heappop(heap)
            b = heapq.heappop(heap)
            heapq.heappush(heap, (a[0] + b[0], serial, ("node", a[2], b[2])))
            serial += 1
        tree = heap[0][2]

    child = []
    code = np.zeros(sigma, dtype=np.int64)
    length = np.zeros(sigma, dtype=np.int64)
    paths: dict[int, list[int]] = {}
    queue = [(tree, 0, 0, [])]
    while queue:
        node, bits, depth, path = queue.pop(0)
        nid = len(child)
        child.append([0, 0])
        for side, sub in enumerate(node[1:]):
            if sub is None:
                child[nid][side] = -(sigma + 1)  # unreachable branch
            elif sub[0] == "leaf":
                c = sub[1]
                child[nid][side] = -(c + 1)
                code[c] = (bits << 1) | side
                length[c] = depth + 1
                paths[c] = path + [nid]
            else:
                # children are numbered in BFS order as they are dequeued
                child[nid][side] = len(child) + len(queue)
                queue.append((sub, (bits << 1) | side, depth + 1, path + [nid]))
    maxlen = int(length.max())
    path_arr = np.zeros((sigma, max(1, maxlen)), dtype=np.int64)
    for c, p in paths.items():
        path_arr[c, : len(p)] = p
    return np.array(child, dtype=np.int64), code, length, path_arr


@njit(cache=True)
def _fill_wavelet(bwt, code, length, path, node_off, nbits):
    bits = np.zeros(nbits, dtype=np.bool_)
    cursor = node_off[:-1].copy()
    for r in range(bwt.shape[0]):
        c = bwt[r]
        L = length[c]
        for d in range(L):
            node = path[c, d]
            if (code[c] >> (L - 1 - d)) & 1:
                bits[cursor[node]] = True
            cursor[node] += 1
    return bits


@njit(cache=True)
def _bwt(text, sa):
    n = text.shape[0]
    out = np.empty(n, dtype=np.int64)
    for r in range(n):
        p = sa[r]
        out[r] = text[p - 1] if p > 0 else text[n - 1]
    return out


# ---------------------------------------------------------------- kernels
#
# ix = (C, words, samples, node_off, node_ones, child, code, length,
#       mark_words, mark_samples, samp_words, samp_width, B)


@njit(cache=True)
def wt_rank(ix, c, i):
    """Occurrences of internal symbol c in BWT[0:i]."""
    words = ix[1]
    samples = ix[2]
    node_off = ix[3]
    node_ones = ix[4]
    child = ix[5]
    L = ix[7][c]
    if L == 0:
        return 0
    code = ix[6][c]
    node = 0
    pos = i
    for d in range(L):
        ones = rank1(words, samples, node_off[node] + pos) - node_ones[node]
        if (code >> (L - 1 - d)) & 1:
            pos = ones
            node = child[node, 1]
        else:
            pos = pos - ones
            node = child[node, 0]
    return pos


@njit(cache=True)
def wt_access(ix, r):
    """(symbol, rank of that symbol before r) for BWT row r."""
    words = ix[1]
    samples = ix[2]
    node_off = ix[3]
    node_ones = ix[4]
    child = ix[5]
    node = 0
    pos = r
    while True:
        at = node_off[node] + pos
        ones = rank1(words, samples, at) - node_ones[node]
        if get_bit(words, at):
            pos = ones
            nxt = child[node, 1]
        else:
            pos = pos - ones
            nxt = child[node, 0]
        if nxt < 0:
            return -nxt - 1, pos
        node = nxt


@njit(cache=True)
def lf(ix, r):
    c, k = wt_access(ix, r)
    return ix[0][c] + k, c


@njit(cache=True)
def extend_kernel(ix, lo, hi, c):
    """Rows prefixed by c + alpha, given the rows [lo, hi] prefixed by alpha."""
    if lo > hi:
        return lo, hi
    base = ix[0][c]
    return base + wt_rank(ix, c, lo), base + wt_rank(ix, c, hi + 1) - 1


@njit(cache=True)
def backward_search_kernel(ix, syms, lo, hi):
    """Fold of extend_kernel over user symbols syms, last to first."""
    for j in range(syms.shape[0] - 1, -1, -1):
        if lo > hi:
            break
        lo, hi = extend_kernel(ix, lo, hi, syms[j] + 1)
    return lo, hi


@njit(cache=True)
def sampled_block(ix, r):
    """Block number if row r is marked, else -1."""
    mark_words = ix[8]
    if get_bit(mark_words, r):
        return packed_get(ix[10], ix[11], rank1(mark_words, ix[9], r))
    return -1


@njit(cache=True)
def locate_kernel(ix, row, buf):
    """Walk LF from row to a marked row; buf[0..k-1] receives the symbols in
    reverse text order.  Returns (block, k) or (-1, k) if no mark within B steps."""
    B = ix[12]
    r = row
    k = 0
    while True:
        b = sampled_block(ix, r)
        if b >= 0:
            return b, k
        if k >= B:
            return -1, k
        c, rk = wt_access(ix, r)
        if c == 0:
            return -1, k
        buf[k] = c - 1
        k += 1
        r = ix[0][c] + rk


@njit(cache=True)
def extract_all_kernel(ix, n):
    out = np.empty(n, dtype=np.int64)
    r = 0
    for i in range(n - 1, -1, -1):
        c, rk = wt_access(ix, r)
        out[i] = c - 1
        r = ix[0][c] + rk
    return out


@njit(cache=True)
def _mark_rows(sa, B):
    N = sa.shape[0]
    n = N - 1
    bits = np.zeros(N, dtype=np.bool_)
    nblocks = (n + B - 1) // B
    blocks = np.zeros(nblocks, dtype=np.int64)
    j = 0
    for r in range(N):
        p = sa[r]
        if p < n and p % B == 0:
            bits[r] = True
            blocks[j] = p // B
            j += 1
    return bits, blocks


# ---------------------------------------------------------------- index


_CSA_HEADER = struct.Struct("<QIHBHHB")
_ARRAY_TYPES = {b"q": np.int64, b"Q": np.uint64, b"I": np.uint32}
_ARRAY_CODES = {np.dtype(v): k for k, v in _ARRAY_TYPES.items()}


def _write_array(buf: io.BytesIO, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(arr)
    buf.write(_ARRAY_CODES[arr.dtype] + struct.pack("<Q", arr.size))
    buf.write(arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes())


def _read_array(view: memoryview, at: int):
    if at + 9 > len(view):
        raise CorruptIndex("csa section truncated")
    code = bytes(view[at : at + 1])
    (count,) = struct.unpack_from("<Q", view, at + 1)
    native = _ARRAY_TYPES.get(code)
    if native is None:
        raise CorruptIndex(f"unknown array type {code!r}")
    size = count * np.dtype(native).itemsize
    start = at + 9
    if start + size > len(view):
        raise CorruptIndex("csa section truncated")
    arr = np.frombuffer(view[start : start + size], dtype=np.dtype(native).newbyteorder("<"))
    return arr.astype(native), start + size


class CsaIndex:
    """FM-index of an order component with block-start sampling."""

    def __init__(self, n, B, params, C, child, code, length, node_off, words, samples,
                 mark_words, mark_samples, samp_words, samp_width):
        self.n = int(n)
        self.B = int(B)
        self.params = params
        self.C = C
        self.child = child
        self.code = code
        self.length = length
        self.node_off = node_off
        self.words = words
        self.samples = samples
        self.node_ones = np.array([rank1(words, samples, int(o)) for o in node_off[:-1]], dtype=np.int64)
        self.mark_words = mark_words
        self.mark_samples = mark_samples
        self.samp_words = samp_words
        self.samp_width = int(samp_width)
        self.kernel_args = (
            C, words, samples, node_off, self.node_ones, child, code, length,
            mark_words, mark_samples, samp_words, np.int64(samp_width), np.int64(B),
        )

    @property
    def sigma(self) -> int:
        """Internal alphabet size including the sentinel."""
        return int(self.C.shape[0] - 1)

    @property
    def rows(self) -> int:
        return self.n + 1

    @property
    def num_samples(self) -> int:
        return -(-self.n // self.B)

    def full_range(self) -> RowRange:
        return RowRange(0, self.n)

    # -- queries

    def _symbol(self, c) -> int:
        c = int(c)
        if not 0 <= c < self.sigma - 1:
            raise InvalidSymbol(f"symbol {c} outside [0, {self.sigma - 1})")
        return c + 1

    def rank(self, c: int, i: int) -> int:
        """Occurrences of user symbol c in the first i BWT rows."""
        return int(wt_rank(self.kernel_args, self._symbol(c), i))

    def bwt_symbol(self, r: int) -> int:
        """User symbol at BWT row r (-1 for the sentinel)."""
        c, _ = wt_access(self.kernel_args, r)
        return int(c) - 1

    def lf(self, r: int) -> int:
        nr, _ = lf(self.kernel_args, r)
        return int(nr)

    def backward_extend(self, rng: RowRange, c) -> RowRange:
        lo, hi = extend_kernel(self.kernel_args, rng.lo, rng.hi, self._symbol(c))
        return RowRange(int(lo), int(hi))

    def backward_search(self, s) -> RowRange:
        syms = np.ascontiguousarray(s, dtype=np.int64)
        if syms.size and (syms.min() < 0 or syms.max() >= self.sigma - 1):
            bad = syms[(syms < 0) | (syms >= self.sigma - 1)][0]
            raise InvalidSymbol(f"symbol {bad} outside [0, {self.sigma - 1})")
        lo, hi = backward_search_kernel(self.kernel_args, syms, 0, self.n)
        return RowRange(int(lo), int(hi))

    def locate_with_context(self, row: int):
        """(t, block, prefix): 1-based text position of the row's suffix, its
        block, and the order symbols from the block start through t - 1."""
        if not 0 <= row <= self.n:
            raise InvalidInput(f"row {row} outside [0, {self.n}]")
        buf = np.empty(self.B + 1, dtype=np.int64)
        block, k = locate_kernel(self.kernel_args, row, buf)
        if block < 0:
            raise InvalidInput(f"row {row} is the sentinel row")
        t = int(block) * self.B + int(k) + 1
        return t, int(block), buf[:k][::-1].copy()

    def extract_order_component(self) -> np.ndarray:
        """Recover the whole order component by walking LF from the sentinel."""
        return extract_all_kernel(self.kernel_args, self.n)

    # -- size / serialization

    def size_breakdown(self) -> dict[str, int]:
        return {
            "wavelet_bits": int(self.words.nbytes),
            "wavelet_rank": int(self.samples.nbytes),
            "marks": int(self.mark_words.nbytes + self.mark_samples.nbytes),
            "samples": int(self.samp_words.nbytes),
            "tables": int(self.C.nbytes + self.child.nbytes + self.code.nbytes + self.length.nbytes + self.node_off.nbytes),
        }

    @property
    def nbytes(self) -> int:
        return len(self.to_bytes())

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        buf.write(_CSA_HEADER.pack(self.n, self.B, self.params.q, int(self.params.strict),
                                   self.sigma, self.child.shape[0], self.samp_width))
        for arr in (self.C, self.child.reshape(-1), self.code, self.length, self.node_off,
                    self.words, self.samples, self.mark_words, self.mark_samples, self.samp_words):
            _write_array(buf, arr)
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, raw) -> "CsaIndex":
        view = memoryview(raw)
        if len(view) < _CSA_HEADER.size:
            raise CorruptIndex("csa section truncated")
        n, B, q, strict, sigma, nodes, width = _CSA_HEADER.unpack_from(view)
        at = _CSA_HEADER.size
        arrays = []
        for _ in range(10):
            arr, at = _read_array(view, at)
            arrays.append(arr)
        if at != len(view):
            raise CorruptIndex("trailing bytes in csa section")
        C, child, code, length, node_off, words, samples, mark_words, mark_samples, samp_words = arrays
        if C.shape[0] != sigma + 1 or child.shape[0] != 2 * nodes or node_off.shape[0] != nodes + 1:
            raise CorruptIndex("csa tables have inconsistent sizes")
        params = OrderParams(q, Mode.STRICT if strict else Mode.WEAK)
        return cls(n, B, params, C, child.reshape(nodes, 2), code, length, node_off, words, samples,
                   mark_words, mark_samples, samp_words, width)


def build_csa(To, B: int, params: OrderParams) -> CsaIndex:
    """BWT + Huffman wavelet tree + block-start samples for the symbols To."""
    if B < 1:
        raise InvalidInput("block size must be positive")
    To = np.asarray(To, dtype=np.int64)
    n = int(To.shape[0])
    if n == 0:
        raise InvalidInput("order component is empty")
    sigma = params.alphabet_size + 1
    if To.min() < 0 or To.max() >= params.alphabet_size:
        raise InvalidSymbol(f"order symbols must lie in [0, {params.alphabet_size})")
    text = np.empty(n + 1, dtype=np.int64)
    text[:n] = To + 1
    text[n] = 0
    sa = suffix_array(text, sigma)
    bwt = _bwt(text, sa)

    counts = np.bincount(text, minlength=sigma)
    C = np.zeros(sigma + 1, dtype=np.int64)
    C[1:] = np.cumsum(counts)
    child, code, length, path = huffman_codes(counts)
    node_sizes = np.zeros(child.shape[0], dtype=np.int64)
    for c in range(sigma):
        for d in range(int(length[c])):
            node_sizes[path[c, d]] += counts[c]
    node_off = np.zeros(child.shape[0] + 1, dtype=np.int64)
    node_off[1:] = np.cumsum(node_sizes)
    nbits = int(node_off[-1])
    words = pack_bits(_fill_wavelet(bwt, code, length, path, node_off, nbits))
    samples = make_rank(words, nbits)
    del bwt

    mark_bits, blocks = _mark_rows(sa, B)
    del sa
    mark_words = pack_bits(mark_bits)
    mark_samples = make_rank(mark_words, n + 1)
    width = max(1, int(blocks.max()).bit_length()) if blocks.size else 1
    samp_words = _pack_ints(blocks, width)
    return CsaIndex(n, B, params, C, child, code, length, node_off, words, samples,
                    mark_words, mark_samples, samp_words, width)


def backward_extend(idx: CsaIndex, rng: RowRange, c) -> RowRange:
    return idx.backward_extend(rng, c)


def backward_search(idx: CsaIndex, s) -> RowRange:
    return idx.backward_search(s)


def locate_with_context(idx: CsaIndex, row: int):
    return idx.locate_with_context(row)
