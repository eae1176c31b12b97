"""On-disk index container.

    magic "OPMI" | version u8 | mode u8 | coder u8 | q u16 | B u32 | n u64
    | section count u32 | (tag 4s, length u64, offset u64) * count | payloads

Integers are little-endian; offsets are absolute byte positions.
"""

from __future__ import annotations

import struct
from pathlib import Path

from .bits import CoderKind
from .deltas import CompressedDeltaStore
from .errors import CorruptIndex, OpmError
from .fm import CsaIndex
from .search import OpmIndex
from .transform import Mode, OrderParams

MAGIC = b"OPMI"
VERSION = 1
TAG_CSA = b"CSA "
TAG_DELTA = b"DLTA"

_HEADER = struct.Struct("<4sBBBHIQI")
_ENTRY = struct.Struct("<4sQQ")


def dump_index(idx: OpmIndex) -> bytes:
    sections = [(TAG_CSA, idx.csa.to_bytes()), (TAG_DELTA, idx.deltas.to_bytes())]
    head = _HEADER.pack(MAGIC, VERSION, int(idx.params.strict), int(idx.coder), idx.q, idx.B, idx.n, len(sections))
    at = len(head) + _ENTRY.size * len(sections)
    table = b""
    for tag, payload in sections:
        table += _ENTRY.pack(tag, len(payload), at)
        at += len(payload)
    return head + table + b"".join(p for _, p in sections)


def load_index(raw) -> OpmIndex:
    view = memoryview(raw)
    if len(view) < _HEADER.size:
        raise CorruptIndex("container shorter than its header")
    magic, version, mode, coder, q, B, n, count = _HEADER.unpack_from(view)
    if magic != MAGIC:
        raise CorruptIndex("bad magic")
    if version != VERSION:
        raise CorruptIndex(f"unsupported container version {version}")
    if mode > 1 or coder > 2:
        raise CorruptIndex("bad mode or coder byte")
    at = _HEADER.size
    if at + _ENTRY.size * count > len(view):
        raise CorruptIndex("section table truncated")
    sections = {}
    end = at + _ENTRY.size * count
    for k in range(count):
        tag, length, off = _ENTRY.unpack_from(view, at + k * _ENTRY.size)
        if off < end or off + length > len(view):
            raise CorruptIndex(f"section {tag!r} lies outside the file")
        sections[tag] = view[off : off + length]
        end = max(end, off + length)
    if end != len(view):
        raise CorruptIndex("container size does not match its section table")
    if TAG_CSA not in sections or TAG_DELTA not in sections:
        raise CorruptIndex("missing CSA or DELTA section")
    params = OrderParams(q, Mode.STRICT if mode else Mode.WEAK)
    try:
        csa = CsaIndex.from_bytes(sections[TAG_CSA])
        store = CompressedDeltaStore.from_bytes(sections[TAG_DELTA])
    except OpmError as exc:
        raise CorruptIndex(str(exc)) from exc
    for part in (csa, store):
        if part.n != n or part.B != B or part.params != params:
            raise CorruptIndex("section parameters disagree with the header")
    if store.coder != coder:
        raise CorruptIndex("delta coder disagrees with the header")
    return OpmIndex(params, CoderKind(coder), csa, store)


def save(idx: OpmIndex, path) -> int:
    raw = dump_index(idx)
    Path(path).write_bytes(raw)
    return len(raw)


def load(path) -> OpmIndex:
    return load_index(Path(path).read_bytes())
