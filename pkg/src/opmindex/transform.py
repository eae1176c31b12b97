"""Order component, delta component, reconstruction and window verification.

Positions in docstrings are 1-based like the formulas they implement; the
arrays themselves are ordinary 0-based numpy arrays, so ``To[i - 1]`` holds
the symbol of position ``i``.

Weak mode breaks value ties by position (an earlier equal value counts as
smaller).  Strict mode codes an equal-valued predecessor at offset ``k`` as
``2k - 1`` and a strictly smaller one as ``2k``.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CorruptComponent, InvalidInput, InvalidParams

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


class Mode(str, enum.Enum):
    WEAK = "weak"
    STRICT = "strict"

    @property
    def strict(self) -> bool:
        return self is Mode.STRICT


@dataclass(frozen=True)
class OrderParams:
    q: int = 4
    mode: Mode = Mode.WEAK

    def __post_init__(self):
        if isinstance(self.mode, str) and not isinstance(self.mode, Mode):
            try:
                object.__setattr__(self, "mode", Mode(self.mode.lower()))
            except ValueError:
                raise InvalidParams(f"unknown mode {self.mode!r}") from None
        if int(self.q) != self.q or self.q < 3:
            raise InvalidParams(f"window size q must be an integer >= 3, got {self.q}")
        if self.q > 32767:
            raise InvalidParams("window size q must fit in 16 bits")

    @property
    def strict(self) -> bool:
        return self.mode is Mode.STRICT

    @property
    def alphabet_size(self) -> int:
        """Number of distinct order-component symbols."""
        return 2 * self.q - 1 if self.strict else self.q


def as_sequence(values, name: str = "sequence") -> np.ndarray:
    """Validate a 32-bit integer sequence and return it as an int64 array."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise InvalidInput(f"{name} is empty")
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        elif arr.dtype == object:
            try:
                arr = np.array([int(v) for v in arr], dtype=np.int64)
            except (TypeError, ValueError, OverflowError):
                raise InvalidInput(f"{name} must contain integers") from None
        else:
            raise InvalidInput(f"{name} must contain integers")
    if arr.dtype == np.uint64 and arr.max() > INT32_MAX:
        raise InvalidInput(f"{name} has values outside the signed 32-bit range")
    arr = arr.astype(np.int64, copy=False)
    if arr.min() < INT32_MIN or arr.max() > INT32_MAX:
        raise InvalidInput(f"{name} has values outside the signed 32-bit range")
    return np.ascontiguousarray(arr)


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def order_kernel(T, q, strict):
    n = T.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        lo = i - q + 1
        if lo < 0:
            lo = 0
        best = -1
        x = T[i]
        for j in range(lo, i):
            # >= keeps the latest of equal predecessor values
            if T[j] <= x and (best < 0 or T[j] >= T[best]):
                best = j
        if best >= 0:
            k = i - best
            if strict:
                out[i] = 2 * k - 1 if T[best] == x else 2 * k
            else:
                out[i] = k
    return out


@njit(cache=True)
def delta_kernel(T, To, q, strict):
    n = T.shape[0]
    out = np.zeros(n, dtype=np.int64)
    out[0] = T[0]
    for i in range(1, n):
        c = To[i]
        if c == 0:
            lo = i - q + 1
            if lo < 0:
                lo = 0
            mn = T[lo]
            for j in range(lo + 1, i):
                if T[j] < mn:
                    mn = T[j]
            out[i] = mn - T[i]
        elif strict:
            if c & 1:
                out[i] = 0
            else:
                out[i] = T[i] - T[i - c // 2]
        else:
            out[i] = T[i] - T[i - c]
    return out


@njit(cache=True)
def reconstruct_kernel(To, Td, q, strict, out):
    """Returns -1 on success, else the 0-based position of the bad symbol."""
    n = To.shape[0]
    out[0] = Td[0]
    for i in range(1, n):
        c = To[i]
        if c == 0:
            lo = i - q + 1
            if lo < 0:
                lo = 0
            mn = out[lo]
            for j in range(lo + 1, i):
                if out[j] < mn:
                    mn = out[j]
            out[i] = mn - Td[i]
        else:
            if strict:
                k = (c + 1) // 2
            else:
                k = c
            if c < 0 or k > i or k >= q:
                return i
            if strict and (c & 1):
                out[i] = out[i - k]
            else:
                out[i] = out[i - k] + Td[i]
    return -1


@njit(cache=True)
def verify_kernel(mu, nu, eq, W, off, strict):
    """Order-isomorphism test of W[off:off+len(mu)] against the tabled pattern."""
    p = mu.shape[0]
    for j in range(p):
        x = W[off + j]
        a = mu[j]
        if a > 0:
            y = W[off + a - 1]
            if strict and eq[j]:
                if y != x:
                    return False
            elif strict:
                if y >= x:
                    return False
            elif y > x:
                return False
        b = nu[j]
        if b > 0 and W[off + b - 1] <= x:
            return False
    return True


# ---------------------------------------------------------------- API


def _params(params) -> OrderParams:
    if isinstance(params, OrderParams):
        return params
    if isinstance(params, int):
        return OrderParams(params)
    raise InvalidParams(f"expected OrderParams, got {params!r}")


def order_component(T, params: OrderParams) -> np.ndarray:
    """Per-position offset of the immediate predecessor inside the size-q window.

    >>> order_component([3, 8, 3, 5, -2, 9, 6, 6], OrderParams(4)).tolist()
    [0, 1, 2, 1, 0, 2, 3, 1]
    """
    params = _params(params)
    T = as_sequence(T)
    return order_kernel(T, params.q, params.strict)


def delta_component(T, To, params: OrderParams) -> np.ndarray:
    """Gap between each value and its predecessor (or the window minimum).

    Entry 1 holds T[1] itself.  In strict mode positions with an odd symbol
    copy an equal predecessor; their delta is reported as 0 and
    :func:`stored_mask` flags them as not stored.
    """
    params = _params(params)
    T = as_sequence(T)
    To = np.asarray(To, dtype=np.int64)
    if To.shape != T.shape:
        raise InvalidInput("order component and sequence lengths differ")
    return delta_kernel(T, To, params.q, params.strict)


def stored_mask(To, params: OrderParams) -> np.ndarray:
    """True where a delta value carries information and must be coded."""
    To = np.asarray(To, dtype=np.int64)
    if _params(params).strict:
        return (To & 1) == 0
    return np.ones(To.shape, dtype=bool)


def reconstruct(To, Td, params: OrderParams) -> np.ndarray:
    """Inverse of the two decompositions; linear time, window of q values."""
    params = _params(params)
    To = np.asarray(To, dtype=np.int64)
    Td = np.asarray(Td, dtype=np.int64)
    if To.ndim != 1 or To.shape != Td.shape or To.size == 0:
        raise InvalidInput("components must be non-empty and of equal length")
    out = np.empty(To.shape[0], dtype=np.int64)
    bad = reconstruct_kernel(To, Td, params.q, params.strict, out)
    if bad >= 0:
        raise CorruptComponent(f"symbol {int(To[bad])} at position {bad + 1} points outside the window")
    return out


@dataclass(frozen=True)
class MatchTables:
    """Pattern-internal predecessor/successor indices (1-based, 0 = none)."""

    mu: np.ndarray
    nu: np.ndarray
    eq: np.ndarray

    def __len__(self) -> int:
        return int(self.mu.shape[0])


def pattern_tables(P, mode=Mode.WEAK) -> MatchTables:
    """Immediate predecessor/successor of every P[j] among P[1..j-1].

    Keys are ``(value, position)``, so the predecessor is the latest of the
    largest values <= P[j] and the successor the earliest of the smallest
    values > P[j].  These are exactly the weak-mode neighbours; strict mode
    uses the same indices plus the equality flag.
    """
    P = as_sequence(P, "pattern")
    p = P.shape[0]
    mu = np.zeros(p, dtype=np.int64)
    nu = np.zeros(p, dtype=np.int64)
    eq = np.zeros(p, dtype=np.bool_)
    seen: list[tuple[int, int]] = []
    for j in range(p):
        key = (int(P[j]), j + 1)
        at = bisect.bisect_left(seen, key)
        if at > 0:
            mu[j] = seen[at - 1][1]
            eq[j] = seen[at - 1][0] == key[0]
        if at < len(seen):
            nu[j] = seen[at][1]
        seen.insert(at, key)
    return MatchTables(mu, nu, eq)


def verify_window(tables: MatchTables, W, mode=Mode.WEAK) -> bool:
    mode = Mode(mode)
    W = np.asarray(W, dtype=np.int64)
    if W.shape[0] != len(tables):
        raise InvalidInput(f"window length {W.shape[0]} != pattern length {len(tables)}")
    return bool(verify_kernel(tables.mu, tables.nu, tables.eq, W, 0, mode.strict))


def order_isomorphic(P, Q, mode=Mode.WEAK) -> bool:
    """Direct pairwise check of P[i] <= P[j] <=> Q[i] <= Q[j].

    Quadratic; used as the reference the fast paths are tested against.  In
    weak mode each value is paired with its index before comparing.
    """
    mode = Mode(mode)
    P = list(P)
    Q = list(Q)
    if len(P) != len(Q):
        return False
    if mode is Mode.WEAK:
        P = [(v, i) for i, v in enumerate(P)]
        Q = [(v, i) for i, v in enumerate(Q)]
    return all((P[i] <= P[j]) == (Q[i] <= Q[j]) for i in range(len(P)) for j in range(len(P)))
