"""Index-free reference search: check every text position with the pattern tables."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidInput
from .transform import Mode, as_sequence, pattern_tables, verify_kernel


@dataclass
class ScanReport:
    positions: np.ndarray
    elapsed: float  # seconds


@njit(cache=True)
def scan_kernel(T, mu, nu, eq, strict):
    p = mu.shape[0]
    out = np.empty(T.shape[0] - p + 1, dtype=np.int64)
    found = 0
    for i in range(T.shape[0] - p + 1):
        if verify_kernel(mu, nu, eq, T, i, strict):
            out[found] = i + 1
            found += 1
    return out[:found]


def scan_search(T, P, mode=Mode.WEAK) -> ScanReport:
    """1-based starts of every window of T order-isomorphic to P."""
    mode = Mode(mode)
    T = as_sequence(T)
    P = as_sequence(P, "pattern")
    if P.shape[0] > T.shape[0]:
        raise InvalidInput(f"pattern length {P.shape[0]} exceeds text length {T.shape[0]}")
    tables = pattern_tables(P, mode)
    t0 = time.perf_counter()
    positions = scan_kernel(T, tables.mu, tables.nu, tables.eq, mode.strict)
    return ScanReport(positions, time.perf_counter() - t0)
