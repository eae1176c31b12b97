"""Block-compressed delta component with random access by block.

Each block of ``B`` positions is coded independently:

    Dlt(m) Dlt(M) [raw prefix] [bounded codes ...] <pad to byte>

``m``/``M`` are the largest deltas of the block's minimal/maximal positions.
Every block after the first starts with ``q - 1`` raw values (the absolute
first value, then differences to the previous value), which keeps every
later sliding window inside the block.  The remaining positions are coded
with the chosen bounded coder; the bound depends on the value class, which
the decoder recomputes from the order component and the values it has
already decoded.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np
from numba import njit

from .bits import CoderKind, get_code, get_dlt, get_signed, put_code, put_dlt, put_signed
from .errors import CorruptBlock, InvalidInput, InvalidParams
from .transform import Mode, OrderParams, as_sequence, delta_component, order_component

MINIMAL = 0
MAXIMAL = 1
INTERMEDIATE = 2
RAW_PREFIX = 3
NOT_STORED = 4

_OK = 0
_ERR_STREAM = 1
_ERR_BOUND = 2
_ERR_SYMBOL = 3
_ERR_INPUT = 4


class ValueClass(enum.IntEnum):
    MINIMAL = MINIMAL
    MAXIMAL = MAXIMAL
    INTERMEDIATE = INTERMEDIATE
    RAW_PREFIX = RAW_PREFIX
    NOT_STORED = NOT_STORED


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def classify_kernel(vals, i, lo, c, q, strict):
    """Class of vals[i] given its window vals[lo:i] and order symbol c.

    Returns (class, base, bound).  base is the window minimum for minimal
    values, the predecessor value otherwise, and the final value itself
    for NOT_STORED.  bound is the exclusive range of intermediate codes.
    """
    if c < 0:
        return -1, 0, 0
    if c == 0:
        if lo >= i:
            return -1, 0, 0
        mn = vals[lo]
        for j in range(lo + 1, i):
            if vals[j] < mn:
                mn = vals[j]
        return MINIMAL, mn, 0
    if strict:
        k = (c + 1) // 2
    else:
        k = c
    if k > i - lo or k >= q:
        return -1, 0, 0
    pred = vals[i - k]
    if strict and (c & 1):
        return NOT_STORED, pred, 0
    mx = vals[lo]
    for j in range(lo + 1, i):
        if vals[j] > mx:
            mx = vals[j]
    if pred == mx:
        return MAXIMAL, pred, 0
    v = mx
    for j in range(lo, i):
        if vals[j] > pred and vals[j] < v:
            v = vals[j]
    w = v - pred
    if strict:
        w -= 1
    if w <= 1:
        return NOT_STORED, pred + 1 if strict else pred, w
    return INTERMEDIATE, pred, w


@njit(cache=True)
def _grow(buf, need):
    size = buf.shape[0]
    while size < need:
        size *= 2
    out = np.zeros(size, dtype=np.uint8)
    out[: buf.shape[0]] = buf
    return out


@njit(cache=True)
def compress_kernel(T, To, q, B, coder, strict):
    n = T.shape[0]
    nblocks = (n + B - 1) // B
    offsets = np.zeros(nblocks, dtype=np.int64)
    buf = np.zeros(64 + n, dtype=np.uint8)
    pos = 0
    # 67 bits bounds any codeword of a 33-bit magnitude
    worst = (B + 2) * 9 + 16
    for k in range(nblocks):
        if (pos >> 3) + worst > buf.shape[0]:
            buf = _grow(buf, (pos >> 3) + worst)
        offsets[k] = pos >> 3
        start = k * B
        end = min(start + B, n)
        raw_end = start + 1 if k == 0 else min(start + q - 1, end)
        m = 0
        M = 0
        for i in range(raw_end, end):
            lo = max(i - q + 1, start)
            cls, base, w = classify_kernel(T, i, lo, To[i], q, strict)
            if cls == MINIMAL:
                m = max(m, base - T[i])
            elif cls == MAXIMAL:
                M = max(M, T[i] - base)
            elif cls < 0:
                return buf[:0], offsets, _ERR_SYMBOL, i
        pos = put_dlt(buf, pos, m)
        pos = put_dlt(buf, pos, M)
        pos = put_signed(buf, pos, T[start])
        for i in range(start + 1, raw_end):
            pos = put_signed(buf, pos, T[i] - T[i - 1])
        shift = 1 if strict else 0
        for i in range(raw_end, end):
            lo = max(i - q + 1, start)
            cls, base, w = classify_kernel(T, i, lo, To[i], q, strict)
            if cls == NOT_STORED:
                if base != T[i]:
                    return buf[:0], offsets, _ERR_SYMBOL, i
                continue
            if cls == MINIMAL:
                value = base - T[i] - shift
                bound = m + 1 - shift
            elif cls == MAXIMAL:
                value = T[i] - base - shift
                bound = M + 1 - shift
            else:
                value = T[i] - base - shift
                bound = w
            if value < 0 or value >= bound:
                return buf[:0], offsets, _ERR_SYMBOL, i
            pos = put_code(buf, pos, coder, value, bound)
        pos = (pos + 7) & ~7
    return buf[: pos >> 3], offsets, _OK, -1


@njit(cache=True)
def decode_block_kernel(buf, bit_lo, bit_hi, k, start, stop, block_end, To, to_off, q, coder, strict, out, out_off):
    """Decode positions start..stop-1 of block k (which begins at start).

    To[to_off + r] and out[out_off + r] hold position start + r.
    """
    pos = bit_lo
    m, pos = get_dlt(buf, pos, bit_hi)
    if pos < 0:
        return _ERR_STREAM
    M, pos = get_dlt(buf, pos, bit_hi)
    if pos < 0:
        return _ERR_STREAM
    raw_end = start + 1 if k == 0 else min(start + q - 1, block_end)
    shift = 1 if strict else 0
    for i in range(start, stop):
        r = out_off + i - start
        if i < raw_end:
            v, pos = get_signed(buf, pos, bit_hi)
            if pos < 0:
                return _ERR_STREAM
            out[r] = v if i == start else out[r - 1] + v
            continue
        lo = out_off + max(i - q + 1, start) - start
        cls, base, w = classify_kernel(out, r, lo, To[to_off + i - start], q, strict)
        if cls < 0:
            return _ERR_SYMBOL
        if cls == NOT_STORED:
            out[r] = base
            continue
        if cls == MINIMAL:
            bound = m + 1 - shift
        elif cls == MAXIMAL:
            bound = M + 1 - shift
        else:
            bound = w
        if bound < 1:
            return _ERR_BOUND
        value, pos = get_code(buf, pos, bit_hi, coder, bound)
        if pos < 0:
            return _ERR_STREAM
        if value >= bound:
            return _ERR_BOUND
        if cls == MINIMAL:
            out[r] = base - value - shift
        else:
            out[r] = base + value + shift
    return _OK


@njit(cache=True)
def extract_kernel(data, offsets, n, B, q, coder, strict, start0, stop0, ctx, out):
    """Decode T[start0:stop0] (0-based) into out, aligned at the block start of start0.

    ctx holds the order symbols from that block start through stop0 - 1.
    """
    nblocks = offsets.shape[0]
    bs = (start0 // B) * B
    b = start0 // B
    while b * B < stop0:
        s = b * B
        e = min(s + B, n)
        st = min(e, stop0)
        hi = offsets[b + 1] if b + 1 < nblocks else data.shape[0]
        status = decode_block_kernel(data, offsets[b] * 8, hi * 8, b, s, st, e, ctx, s - bs, q, coder, strict, out, s - bs)
        if status != _OK:
            return status
        b += 1
    return _OK


# ---------------------------------------------------------------- API


_STORE_HEADER = struct.Struct("<IBBHQQQ")


@dataclass
class CompressedDeltaStore:
    B: int
    coder: CoderKind
    params: OrderParams
    n: int
    offsets: np.ndarray
    data: np.ndarray

    @property
    def num_blocks(self) -> int:
        return int(self.offsets.shape[0])

    @property
    def nbytes(self) -> int:
        """Serialized size: header, 64-bit block offsets and the payload."""
        return _STORE_HEADER.size + 8 * self.num_blocks + int(self.data.shape[0])

    def block_bounds(self, k: int) -> tuple[int, int]:
        """1-based first and last position of block k."""
        if not 0 <= k < self.num_blocks:
            raise InvalidInput(f"block {k} out of range [0, {self.num_blocks})")
        return k * self.B + 1, min(k * self.B + self.B, self.n)

    def to_bytes(self) -> bytes:
        head = _STORE_HEADER.pack(
            self.B, int(self.coder), int(self.params.strict), self.params.q, self.n, self.num_blocks, self.data.shape[0]
        )
        return head + self.offsets.astype("<u8").tobytes() + self.data.tobytes()

    @classmethod
    def from_bytes(cls, raw) -> "CompressedDeltaStore":
        raw = memoryview(raw)
        if len(raw) < _STORE_HEADER.size:
            raise CorruptBlock("delta section truncated")
        B, coder, strict, q, n, nblocks, size = _STORE_HEADER.unpack_from(raw)
        need = _STORE_HEADER.size + 8 * nblocks + size
        if B == 0 or len(raw) != need or nblocks != -(-n // B):
            raise CorruptBlock("delta section has inconsistent lengths")
        at = _STORE_HEADER.size
        offsets = np.frombuffer(raw[at : at + 8 * nblocks], dtype="<u8").astype(np.int64)
        data = np.frombuffer(raw[at + 8 * nblocks : need], dtype=np.uint8).copy()
        if nblocks and (offsets[0] != 0 or np.any(np.diff(offsets) <= 0) or offsets[-1] >= max(size, 1)):
            raise CorruptBlock("delta block offsets are not increasing")
        params = OrderParams(q, Mode.STRICT if strict else Mode.WEAK)
        return cls(B, CoderKind(coder), params, n, offsets, data)

    def _raise(self, status: int, where: str):
        reason = {
            _ERR_STREAM: "bit stream exhausted",
            _ERR_BOUND: "decoded value violates its bound",
            _ERR_SYMBOL: "order symbol inconsistent with decoded context",
        }.get(status, f"status {status}")
        raise CorruptBlock(f"{where}: {reason}")


def classify(i: int, To, decoded, params: OrderParams, B: int) -> ValueClass:
    """Value class of 1-based position i.

    ``decoded`` must hold the values of the block up to i - 1, indexed like
    the full sequence (entries outside the block are never read).
    """
    To = np.asarray(To, dtype=np.int64)
    vals = np.asarray(decoded, dtype=np.int64)
    i0 = i - 1
    start = (i0 // B) * B
    raw_end = start + 1 if start == 0 else start + params.q - 1
    if i0 < raw_end:
        return ValueClass.RAW_PREFIX
    lo = max(i0 - params.q + 1, start)
    cls, _, _ = classify_kernel(vals, i0, lo, To[i0], params.q, params.strict)
    if cls < 0:
        raise InvalidInput(f"symbol {To[i0]} at position {i} is not decodable")
    return ValueClass(cls)


def compress(T, To, Td, B: int, coder, params: OrderParams) -> CompressedDeltaStore:
    if B < params.q:
        raise InvalidParams(f"block size {B} must be at least q = {params.q}")
    T = as_sequence(T)
    To = np.ascontiguousarray(To, dtype=np.int64)
    if Td is not None:
        Td = np.asarray(Td, dtype=np.int64)
        if Td.shape != T.shape:
            raise InvalidInput("delta component and sequence lengths differ")
    if To.shape != T.shape:
        raise InvalidInput("order component and sequence lengths differ")
    coder = CoderKind.parse(coder)
    data, offsets, status, at = compress_kernel(T, To, params.q, B, int(coder), params.strict)
    if status != _OK:
        raise InvalidInput(f"order component inconsistent with the sequence at position {at + 1}")
    return CompressedDeltaStore(B, coder, params, int(T.shape[0]), offsets, data.copy())


def compress_sequence(T, B: int = 32, coder=CoderKind.LSK, params: OrderParams = OrderParams()):
    """Convenience: compute both components and compress; returns (To, store)."""
    T = as_sequence(T)
    To = order_component(T, params)
    return To, compress(T, To, delta_component(T, To, params), B, coder, params)


def extract_window(store: CompressedDeltaStore, start: int, length: int, To_context) -> np.ndarray:
    """T[start .. start+length-1] (1-based).

    ``To_context`` holds the order symbols from the first position of the
    block containing ``start`` through ``start + length - 1``.
    """
    if length < 1 or start < 1 or start + length - 1 > store.n:
        raise InvalidInput(f"window [{start}, {start + length - 1}] outside [1, {store.n}]")
    start0 = start - 1
    bs = (start0 // store.B) * store.B
    span = start0 + length - bs
    ctx = np.ascontiguousarray(To_context, dtype=np.int64)
    if ctx.shape[0] < span:
        raise InvalidInput(f"order context covers {ctx.shape[0]} positions, {span} needed")
    out = np.empty(span, dtype=np.int64)
    status = extract_kernel(
        store.data, store.offsets, store.n, store.B, store.params.q, int(store.coder),
        store.params.strict, start0, start0 + length, ctx, out,
    )
    if status != _OK:
        store._raise(status, f"window at {start}")
    return out[start0 - bs :]


def decompress_block(store: CompressedDeltaStore, k: int, To_slice) -> np.ndarray:
    first, last = store.block_bounds(k)
    return extract_window(store, first, last - first + 1, To_slice)


def decompress_all(store: CompressedDeltaStore, To) -> np.ndarray:
    return extract_window(store, 1, store.n, To)
