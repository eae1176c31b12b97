"""Order-preserving pattern matching over compressed integer sequences."""

from .bits import BitStream, CoderKind, decode_bounded, decode_signed_raw, encode_bounded, encode_signed_raw
from .container import dump_index, load, load_index, save
from .deltas import CompressedDeltaStore, compress, compress_sequence, decompress_all, extract_window
from .errors import (
    CorruptBlock,
    CorruptComponent,
    CorruptIndex,
    CorruptStream,
    InvalidInput,
    InvalidParams,
    InvalidSymbol,
    OpmError,
    OutOfRange,
    PatternTooShort,
)
from .fm import CsaIndex, RowRange, build_csa
from .scan import ScanReport, scan_search
from .search import OpmIndex, SearchStats, search
from .transform import (
    MatchTables,
    Mode,
    OrderParams,
    delta_component,
    order_component,
    order_isomorphic,
    pattern_tables,
    reconstruct,
    verify_window,
)

__all__ = [
    "BitStream", "CoderKind", "CompressedDeltaStore", "CorruptBlock", "CorruptComponent", "CorruptIndex",
    "CorruptStream", "CsaIndex", "InvalidInput", "InvalidParams", "InvalidSymbol", "MatchTables", "Mode",
    "OpmError", "OpmIndex", "OrderParams", "OutOfRange", "PatternTooShort", "RowRange", "ScanReport",
    "SearchStats", "build_csa", "compress", "compress_sequence", "decode_bounded", "decode_signed_raw",
    "decompress_all", "delta_component", "dump_index", "encode_bounded", "encode_signed_raw", "extract_window",
    "load", "load_index", "order_component", "order_isomorphic", "pattern_tables", "reconstruct", "save",
    "scan_search", "search", "verify_window",
]
