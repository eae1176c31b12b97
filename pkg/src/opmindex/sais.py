"""Suffix array construction by induced sorting (SA-IS).

The recursion runs in Python; each level's linear passes are njit kernels.
Input strings must end with a unique smallest sentinel 0.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _types(s):
    n = s.shape[0]
    t = np.zeros(n, dtype=np.bool_)  # True = S-type
    t[n - 1] = True
    for i in range(n - 2, -1, -1):
        if s[i] < s[i + 1] or (s[i] == s[i + 1] and t[i + 1]):
            t[i] = True
    return t


@njit(cache=True)
def _is_lms(t, i):
    return i > 0 and t[i] and not t[i - 1]


@njit(cache=True)
def _bucket_bounds(s, K, tails):
    cnt = np.zeros(K, dtype=np.int64)
    for c in s:
        cnt[c] += 1
    out = np.zeros(K, dtype=np.int64)
    acc = 0
    for c in range(K):
        acc += cnt[c]
        out[c] = acc if tails else acc - cnt[c]
    return out


@njit(cache=True)
def _induce(s, t, K, sa):
    n = s.shape[0]
    heads = _bucket_bounds(s, K, False)
    for i in range(n):
        j = sa[i] - 1
        if sa[i] > 0 and not t[j]:
            sa[heads[s[j]]] = j
            heads[s[j]] += 1
    tails = _bucket_bounds(s, K, True)
    for i in range(n - 1, -1, -1):
        j = sa[i] - 1
        if sa[i] > 0 and t[j]:
            tails[s[j]] -= 1
            sa[tails[s[j]]] = j


@njit(cache=True)
def _seed_lms(s, t, K):
    n = s.shape[0]
    sa = np.full(n, -1, dtype=np.int64)
    tails = _bucket_bounds(s, K, True)
    for i in range(n - 1, 0, -1):
        if _is_lms(t, i):
            tails[s[i]] -= 1
            sa[tails[s[i]]] = i
    return sa


@njit(cache=True)
def _lms_equal(s, t, a, b):
    n = s.shape[0]
    if a == n - 1 or b == n - 1:
        return a == b
    d = 0
    while True:
        if s[a + d] != s[b + d] or t[a + d] != t[b + d]:
            return False
        if d > 0:
            la = _is_lms(t, a + d)
            lb = _is_lms(t, b + d)
            if la and lb:
                return True
            if la != lb:
                return False
        d += 1


@njit(cache=True)
def _reduce(s, t, sa):
    """Name the sorted LMS substrings; returns (reduced string, alphabet, LMS positions)."""
    n = s.shape[0]
    names = np.full(n, -1, dtype=np.int64)
    name = -1
    prev = -1
    for i in range(n):
        p = sa[i]
        if _is_lms(t, p):
            if prev < 0 or not _lms_equal(s, t, prev, p):
                name += 1
            names[p] = name
            prev = p
    count = 0
    for i in range(n):
        if names[i] >= 0:
            count += 1
    reduced = np.empty(count, dtype=np.int64)
    positions = np.empty(count, dtype=np.int64)
    j = 0
    for i in range(n):
        if names[i] >= 0:
            reduced[j] = names[i]
            positions[j] = i
            j += 1
    return reduced, name + 1, positions


@njit(cache=True)
def _seed_sorted(s, K, order):
    n = s.shape[0]
    sa = np.full(n, -1, dtype=np.int64)
    tails = _bucket_bounds(s, K, True)
    for i in range(order.shape[0] - 1, -1, -1):
        p = order[i]
        tails[s[p]] -= 1
        sa[tails[s[p]]] = p
    return sa


def suffix_array(s: np.ndarray, K: int) -> np.ndarray:
    """Suffix array of ``s`` (values in [0, K), unique terminal 0)."""
    s = np.ascontiguousarray(s, dtype=np.int64)
    n = s.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    t = _types(s)
    sa = _seed_lms(s, t, K)
    _induce(s, t, K, sa)
    reduced, K1, positions = _reduce(s, t, sa)
    if K1 < reduced.shape[0]:
        sa1 = suffix_array(reduced, K1)
    else:
        sa1 = np.empty(reduced.shape[0], dtype=np.int64)
        sa1[reduced] = np.arange(reduced.shape[0])
    sa = _seed_sorted(s, K, positions[sa1])
    _induce(s, t, K, sa)
    return sa


def naive_suffix_array(s) -> list[int]:
    s = list(s)
    return sorted(range(len(s)), key=lambda i: s[i:])
