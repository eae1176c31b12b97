"""Bit streams and the three bounded integer codes (lsk, dlt, lsd).

Bits are written MSB-first into zero-initialised ``uint8`` buffers.  The
njit kernels below are shared by the Python-level :class:`BitStream` API and
by the bulk block coder in :mod:`opmindex.deltas`, so both produce the same
bytes.

Kernel conventions: ``pos`` and ``end`` are bit offsets; readers return
``(value, new_pos)`` and signal a truncated codeword with ``new_pos == -1``.
"""

from __future__ import annotations

import enum

import numpy as np
from numba import njit

from .errors import CorruptStream, OutOfRange

LSK = 0
DLT = 1
LSD = 2


class CoderKind(enum.IntEnum):
    LSK = LSK
    DLT = DLT
    LSD = LSD

    @classmethod
    def parse(cls, value) -> "CoderKind":
        if isinstance(value, CoderKind):
            return value
        if isinstance(value, str):
            try:
                return cls[value.upper()]
            except KeyError:
                raise ValueError(f"unknown coder {value!r}") from None
        return cls(int(value))


@njit(cache=True)
def bit_length(x):
    n = 0
    while x > 0:
        x >>= 1
        n += 1
    return n


@njit(cache=True)
def put_bits(buf, pos, value, nbits):
    # buf must be zeroed past pos; value < 2**62, nbits <= 62
    while nbits > 0:
        byte = pos >> 3
        free = 8 - (pos & 7)
        take = free if free < nbits else nbits
        chunk = (value >> (nbits - take)) & ((1 << take) - 1)
        buf[byte] |= np.uint8(chunk << (free - take))
        pos += take
        nbits -= take
    return pos


@njit(cache=True)
def get_bits(buf, pos, end, nbits):
    if pos + nbits > end:
        return 0, -1
    v = 0
    while nbits > 0:
        byte = pos >> 3
        avail = 8 - (pos & 7)
        take = avail if avail < nbits else nbits
        chunk = (np.int64(buf[byte]) >> (avail - take)) & ((1 << take) - 1)
        v = (v << take) | chunk
        pos += take
        nbits -= take
    return v, pos


# ---------------------------------------------------------------- lengths


@njit(cache=True)
def lsk_length(value, w):
    if w <= 1:
        return 0
    k = bit_length(w) - 1
    u = (1 << (k + 1)) - w
    return k if value < u else k + 1


@njit(cache=True)
def dlt_length(value):
    return 2 * bit_length(value + 1) - 1


@njit(cache=True)
def lsd_length(value, w):
    L = bit_length(value + 1)
    return lsk_length(L - 1, bit_length(w)) + L - 1


@njit(cache=True)
def code_length(kind, value, w):
    if kind == LSK:
        return lsk_length(value, w)
    if kind == DLT:
        return dlt_length(value)
    return lsd_length(value, w)


# ---------------------------------------------------------------- writers


@njit(cache=True)
def put_lsk(buf, pos, value, w):
    """Truncated binary: k-bit codes for the u smallest values, k+1 bits for the rest."""
    if w <= 1:
        return pos
    k = bit_length(w) - 1
    u = (1 << (k + 1)) - w
    if value < u:
        return put_bits(buf, pos, value, k)
    return put_bits(buf, pos, value + u, k + 1)


@njit(cache=True)
def put_dlt(buf, pos, value):
    x = value + 1
    L = bit_length(x)
    # L-1 zero bits are already present in the zeroed buffer
    return put_bits(buf, pos + L - 1, x, L)


@njit(cache=True)
def put_lsd(buf, pos, value, w):
    x = value + 1
    L = bit_length(x)
    pos = put_lsk(buf, pos, L - 1, bit_length(w))
    return put_bits(buf, pos, x & ((1 << (L - 1)) - 1), L - 1)


@njit(cache=True)
def put_code(buf, pos, kind, value, w):
    if kind == LSK:
        return put_lsk(buf, pos, value, w)
    if kind == DLT:
        return put_dlt(buf, pos, value)
    return put_lsd(buf, pos, value, w)


@njit(cache=True)
def zigzag(v):
    return 2 * v if v >= 0 else -2 * v - 1


@njit(cache=True)
def unzigzag(z):
    return z >> 1 if (z & 1) == 0 else -((z + 1) >> 1)


@njit(cache=True)
def put_signed(buf, pos, v):
    return put_dlt(buf, pos, zigzag(v))


# ---------------------------------------------------------------- readers


@njit(cache=True)
def get_lsk(buf, pos, end, w):
    if w <= 1:
        return 0, pos
    k = bit_length(w) - 1
    u = (1 << (k + 1)) - w
    x, pos = get_bits(buf, pos, end, k)
    if pos < 0:
        return 0, -1
    if x < u:
        return x, pos
    b, pos = get_bits(buf, pos, end, 1)
    if pos < 0:
        return 0, -1
    return ((x << 1) | b) - u, pos


@njit(cache=True)
def get_dlt(buf, pos, end):
    zeros = 0
    while True:
        if pos >= end or zeros > 62:
            return 0, -1
        if (buf[pos >> 3] >> (7 - (pos & 7))) & 1:
            break
        zeros += 1
        pos += 1
    x, pos = get_bits(buf, pos, end, zeros + 1)
    if pos < 0:
        return 0, -1
    return x - 1, pos


@njit(cache=True)
def get_lsd(buf, pos, end, w):
    lm1, pos = get_lsk(buf, pos, end, bit_length(w))
    if pos < 0:
        return 0, -1
    rest, pos = get_bits(buf, pos, end, lm1)
    if pos < 0:
        return 0, -1
    return ((1 << lm1) | rest) - 1, pos


@njit(cache=True)
def get_code(buf, pos, end, kind, w):
    if kind == LSK:
        return get_lsk(buf, pos, end, w)
    if kind == DLT:
        return get_dlt(buf, pos, end)
    return get_lsd(buf, pos, end, w)


@njit(cache=True)
def get_signed(buf, pos, end):
    z, pos = get_dlt(buf, pos, end)
    return unzigzag(z), pos


# ---------------------------------------------------------------- stream API


class BitStream:
    """Append-only bit buffer with an independent read cursor.

    >>> s = BitStream()
    >>> encode_bounded(CoderKind.LSK, 3, 5, s)
    3
    >>> s.to01()
    '110'
    """

    def __init__(self, data: bytes = b"", nbits: int | None = None):
        self._buf = np.zeros(max(64, 2 * len(data) + 16), dtype=np.uint8)
        self._buf[: len(data)] = np.frombuffer(data, dtype=np.uint8)
        self.nbits = 8 * len(data) if nbits is None else nbits
        if self.nbits % 8:
            self._buf[self.nbits // 8] &= np.uint8((0xFF00 >> (self.nbits % 8)) & 0xFF)
        self._buf[(self.nbits + 7) // 8 :] = 0
        self.pos = 0

    def __len__(self) -> int:
        return self.nbits

    def _reserve(self, extra_bits: int) -> None:
        need = (self.nbits + extra_bits) // 8 + 16
        if need > len(self._buf):
            grown = np.zeros(max(need, 2 * len(self._buf)), dtype=np.uint8)
            grown[: len(self._buf)] = self._buf
            self._buf = grown

    def write(self, value: int, nbits: int) -> None:
        if value < 0 or (nbits < 62 and value >> nbits):
            raise OutOfRange(f"{value} does not fit in {nbits} bits")
        self._reserve(nbits)
        self.nbits = put_bits(self._buf, self.nbits, value, nbits)

    def read(self, nbits: int) -> int:
        v, pos = get_bits(self._buf, self.pos, self.nbits, nbits)
        if pos < 0:
            raise CorruptStream("stream exhausted")
        self.pos = pos
        return v

    def align(self) -> None:
        """Pad with zero bits up to the next byte boundary."""
        self.nbits = (self.nbits + 7) & ~7

    def to_bytes(self) -> bytes:
        return self._buf[: (self.nbits + 7) // 8].tobytes()

    def to01(self) -> str:
        bits = np.unpackbits(self._buf[: (self.nbits + 7) // 8])[: self.nbits]
        return "".join("1" if b else "0" for b in bits)

    @classmethod
    def from01(cls, text: str) -> "BitStream":
        s = cls()
        for ch in text:
            s.write(1 if ch == "1" else 0, 1)
        return s


def encode_bounded(kind, value: int, w: int, out: BitStream) -> int:
    """Append the codeword of ``value`` in ``[0, w)``; returns the bit count."""
    kind = CoderKind.parse(kind)
    if w < 1 or not 0 <= value < w:
        raise OutOfRange(f"value {value} outside [0, {w})")
    out._reserve(2 * 64)
    before = out.nbits
    out.nbits = put_code(out._buf, out.nbits, int(kind), value, w)
    return out.nbits - before


def decode_bounded(kind, inp: BitStream, w: int) -> int:
    kind = CoderKind.parse(kind)
    value, pos = get_code(inp._buf, inp.pos, inp.nbits, int(kind), w)
    if pos < 0:
        raise CorruptStream("stream exhausted mid-codeword")
    if value >= w:
        raise CorruptStream(f"decoded {value} is outside [0, {w})")
    inp.pos = pos
    return value


def encode_signed_raw(v: int, out: BitStream) -> int:
    """Zig-zag map then Dlt; used for block anchors."""
    if abs(v) >= 2**60:
        raise OutOfRange(f"{v} is too large for the raw code")
    out._reserve(2 * 64)
    before = out.nbits
    out.nbits = put_signed(out._buf, out.nbits, v)
    return out.nbits - before


def decode_signed_raw(inp: BitStream) -> int:
    v, pos = get_signed(inp._buf, inp.pos, inp.nbits)
    if pos < 0:
        raise CorruptStream("stream exhausted mid-codeword")
    inp.pos = pos
    return v


def codeword_length(kind, value: int, w: int) -> int:
    return code_length(int(CoderKind.parse(kind)), value, w)
