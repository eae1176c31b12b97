"""Filter-then-verify order-preserving search over the compressed index.

For a pattern P of length p > q:

1. backward search the pattern's order symbols Po[q..p]; they must occur
   verbatim in the text's order component because each of those windows
   lies inside the pattern;
2. extend the range one symbol at a time for j = q-1 .. 2, trying Po[j]
   and every symbol pointing at or before the pattern's first value (the
   text may have a predecessor there that the pattern does not see);
3. for every row of a full-depth range, recover the text position and its
   block context, decode the values and run the exact window check.

Phases 2 and 3 are interleaved: each range is verified as soon as it is
produced.  Positions are sorted before they are returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

from .bits import CoderKind
from .deltas import _OK, CompressedDeltaStore, compress, decompress_all, extract_kernel
from .errors import CorruptBlock, InvalidInput, InvalidParams, PatternTooShort
from .fm import CsaIndex, RowRange, build_csa, extend_kernel, locate_kernel, wt_access
from .transform import (
    MatchTables,
    Mode,
    OrderParams,
    as_sequence,
    delta_component,
    order_component,
    pattern_tables,
    verify_kernel,
)


@dataclass
class SearchStats:
    phase1_rows: int = 0
    phase2_candidates: int = 0
    occurrences: int = 0

    @property
    def phase1_ratio(self) -> float:
        return self.phase1_rows / self.occurrences if self.occurrences else math.inf

    @property
    def phase2_ratio(self) -> float:
        return self.phase2_candidates / self.occurrences if self.occurrences else math.inf


@dataclass
class OpmIndex:
    params: OrderParams
    coder: CoderKind
    csa: CsaIndex
    deltas: CompressedDeltaStore

    @property
    def n(self) -> int:
        return self.csa.n

    @property
    def B(self) -> int:
        return self.csa.B

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def mode(self) -> Mode:
        return self.params.mode

    @classmethod
    def build(cls, T, q: int = 4, B: int = 32, coder=CoderKind.LSK, mode=Mode.WEAK) -> "OpmIndex":
        params = OrderParams(q, Mode(mode))
        if B < q:
            raise InvalidParams(f"block size {B} must be at least q = {q}")
        T = as_sequence(T)
        To = order_component(T, params)
        store = compress(T, To, delta_component(T, To, params), B, coder, params)
        return cls(params, CoderKind.parse(coder), build_csa(To, B, params), store)

    def size_breakdown(self) -> dict[str, int]:
        csa = self.csa.nbytes
        delta = self.deltas.nbytes
        return {"n": self.n, "raw": 4 * self.n, "csa": csa, "delta": delta, "total": csa + delta}

    def order_component(self) -> np.ndarray:
        return self.csa.extract_order_component()

    def decompress(self) -> np.ndarray:
        return decompress_all(self.deltas, self.order_component())

    def search(self, P) -> tuple[np.ndarray, SearchStats]:
        return search(self, P)


# ---------------------------------------------------------------- phases


def _pattern_order(idx: OpmIndex, P) -> tuple[np.ndarray, np.ndarray]:
    P = as_sequence(P, "pattern")
    if P.shape[0] <= idx.q:
        raise PatternTooShort(f"pattern length {P.shape[0]} must exceed q = {idx.q}")
    return P, order_component(P, idx.params)


def phase1(idx: OpmIndex, Po) -> RowRange:
    """Rows prefixed by Po[q..p] (1-based)."""
    Po = np.asarray(Po, dtype=np.int64)
    if Po.shape[0] <= idx.q:
        raise PatternTooShort(f"pattern length {Po.shape[0]} must exceed q = {idx.q}")
    return idx.csa.backward_search(Po[idx.q - 1 :])


def level_candidates(j: int, Po, params: OrderParams) -> list[int]:
    """Symbols the text may hold at pattern position j (1-based, 2 <= j < q)."""
    own = int(Po[j - 1])
    if params.strict:
        if own & 1:
            # an equal value inside the pattern prefix pins the symbol
            return [own]
        alt = range(2 * j - 1, 2 * (params.q - 1) + 1)
    else:
        alt = range(j, params.q)
    return [own] + [v for v in alt if v != own]


def candidate_strings(Po, params: OrderParams) -> Iterator[tuple[int, ...]]:
    """All strings x_2..x_{q-1} Po[q..p] in depth-first order, without an index."""
    Po = np.asarray(Po, dtype=np.int64)
    q = params.q
    tail = tuple(int(v) for v in Po[q - 1 :])

    def dfs(j, suffix):
        if j < 2:
            yield suffix
            return
        for c in level_candidates(j, Po, params):
            yield from dfs(j - 1, (c,) + suffix)

    yield from dfs(q - 1, tail)


def phase2_enumerate(idx: OpmIndex, rng: RowRange, Po, P=None, params: OrderParams | None = None):
    """Lazily yield (candidate string, RowRange) for every non-empty full-depth range."""
    params = params or idx.params
    Po = np.asarray(Po, dtype=np.int64)
    q = params.q
    ix = idx.csa.kernel_args
    tail = tuple(int(v) for v in Po[q - 1 :])
    levels = {j: level_candidates(j, Po, params) for j in range(2, q)}

    def dfs(j, lo, hi, suffix):
        if j < 2:
            yield suffix, RowRange(int(lo), int(hi))
            return
        for c in levels[j]:
            nlo, nhi = extend_kernel(ix, lo, hi, c + 1)
            if nlo <= nhi:
                yield from dfs(j - 1, nlo, nhi, (c,) + suffix)

    if not rng.empty:
        yield from dfs(q - 1, rng.lo, rng.hi, tail)


@njit(cache=True)
def phase3_kernel(ix, data, offsets, n, B, q, coder, strict, lo, hi, tail, mu, nu, eq, out):
    """Verify rows lo..hi; matches go to out, returns (count, status)."""
    p = mu.shape[0]
    C = ix[0]
    walk = np.empty(B + 1, dtype=np.int64)
    ctx = np.empty(B + p + 1, dtype=np.int64)
    vals = np.empty(B + 2 * p + 1, dtype=np.int64)
    found = 0
    for r in range(lo, hi + 1):
        c, rk = wt_access(ix, r)
        if c == 0:
            # suffix starts at the first position: no room for the pattern's first value
            continue
        block, k = locate_kernel(ix, C[c] + rk, walk)
        if block < 0:
            return found, -1
        s0 = block * B + k
        if s0 + p > n:
            continue
        for i in range(k):
            ctx[i] = walk[k - 1 - i]
        ctx[k] = c - 1
        for i in range(p - 1):
            ctx[k + 1 + i] = tail[i]
        status = extract_kernel(data, offsets, n, B, q, coder, strict, s0, s0 + p, ctx, vals)
        if status != _OK:
            return found, status
        if verify_kernel(mu, nu, eq, vals, k, strict):
            out[found] = s0 + 1
            found += 1
    return found, 0


def _verify_range(idx: OpmIndex, rng: RowRange, tail: np.ndarray, tables: MatchTables) -> np.ndarray:
    st = idx.deltas
    out = np.empty(len(rng), dtype=np.int64)
    found, status = phase3_kernel(
        idx.csa.kernel_args, st.data, st.offsets, st.n, st.B, st.params.q, int(st.coder), st.params.strict,
        rng.lo, rng.hi, tail, tables.mu, tables.nu, tables.eq, out,
    )
    if status < 0:
        raise CorruptBlock(f"no sampled row reachable from rows {rng.lo}..{rng.hi}")
    if status:
        st._raise(status, f"verifying rows {rng.lo}..{rng.hi}")
    return out[:found]


def phase3_verify(idx: OpmIndex, row: int, P, tables: MatchTables, candidate) -> int | None:
    """1-based match start for one Phase 2 row, or None for a false positive.

    ``candidate`` is the full-depth string x_2..x_{q-1} Po[q..p] that
    prefixes the row.
    """
    P = as_sequence(P, "pattern")
    tail = np.asarray(candidate, dtype=np.int64)
    if tail.shape[0] != P.shape[0] - 1 or len(tables) != P.shape[0]:
        raise InvalidInput("candidate, tables and pattern lengths disagree")
    hits = _verify_range(idx, RowRange(row, row), tail, tables)
    return int(hits[0]) if hits.size else None


def search(idx: OpmIndex, P) -> tuple[np.ndarray, SearchStats]:
    """Sorted 1-based starts of all windows of T order-isomorphic to P."""
    P, Po = _pattern_order(idx, P)
    tables = pattern_tables(P, idx.mode)
    stats = SearchStats()
    first = phase1(idx, Po)
    stats.phase1_rows = len(first)
    hits = []
    for cand, rng in phase2_enumerate(idx, first, Po):
        stats.phase2_candidates += len(rng)
        found = _verify_range(idx, rng, np.array(cand, dtype=np.int64), tables)
        if found.size:
            hits.append(found)
    positions = np.sort(np.concatenate(hits)) if hits else np.empty(0, dtype=np.int64)
    stats.occurrences = int(positions.shape[0])
    return positions, stats
