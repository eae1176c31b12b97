"""Corpus and pattern files, synthetic generators and pattern extraction."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .transform import INT32_MAX, INT32_MIN, as_sequence

STEP = 20  # generators draw from [-STEP, STEP]


def read_corpus(path) -> np.ndarray:
    """Raw little-endian int32 values, no header."""
    raw = Path(path).read_bytes()
    if len(raw) % 4:
        raise InvalidInput(f"{path}: size {len(raw)} is not a multiple of 4")
    if not raw:
        raise InvalidInput(f"{path}: corpus is empty")
    return np.frombuffer(raw, dtype="<i4").astype(np.int64)


def write_corpus(path, T) -> None:
    Path(path).write_bytes(as_sequence(T).astype("<i4").tobytes())


def parse_patterns(text: str) -> list[np.ndarray]:
    """One pattern per non-blank line, whitespace-separated decimal integers."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            vals = [int(tok) for tok in line.split()]
        except ValueError:
            raise InvalidInput(f"line {lineno}: not a list of integers") from None
        if any(v < INT32_MIN or v > INT32_MAX for v in vals):
            raise InvalidInput(f"line {lineno}: value outside the signed 32-bit range")
        out.append(np.array(vals, dtype=np.int64))
    return out


def read_patterns(path) -> list[np.ndarray]:
    return parse_patterns(Path(path).read_text())


def format_patterns(patterns) -> str:
    return "".join(" ".join(str(int(v)) for v in P) + "\n" for P in patterns)


def write_patterns(path, patterns) -> None:
    Path(path).write_text(format_patterns(patterns))


def generate(kind: str, n: int, seed: int) -> np.ndarray:
    """``rwalk``: running sum of uniform steps in [-20, 20] from 0; ``rand``: the steps themselves."""
    if n < 1:
        raise InvalidInput("n must be positive")
    rng = np.random.default_rng(seed)
    if kind == "rand":
        return rng.integers(-STEP, STEP + 1, n).astype(np.int64)
    if kind == "rwalk":
        T = np.zeros(n, dtype=np.int64)
        np.cumsum(rng.integers(-STEP, STEP + 1, n - 1), out=T[1:])
        if T.min() < INT32_MIN or T.max() > INT32_MAX:
            raise InvalidInput("random walk left the 32-bit range; use a different seed or length")
        return T
    raise InvalidInput(f"unknown corpus kind {kind!r}")


def extract_patterns(T, count: int, length: int, seed: int) -> list[np.ndarray]:
    """``count`` windows of T copied from uniform random starts (with replacement)."""
    T = np.asarray(T, dtype=np.int64)
    if length < 1 or length > T.shape[0]:
        raise InvalidInput(f"pattern length {length} must lie in [1, {T.shape[0]}]")
    if count < 0:
        raise InvalidInput("count must be non-negative")
    rng = np.random.default_rng(seed)
    starts = rng.integers(0, T.shape[0] - length + 1, count)
    return [T[s : s + length].copy() for s in starts]
