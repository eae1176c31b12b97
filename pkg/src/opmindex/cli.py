"""opmindex command line: build, search, scan, stats, gen, extract.

Match lines read ``ordinal count pos1 pos2 ...`` with 1-based positions.
Lines starting with ``#`` carry statistics and timings.  Exit status is 0 on
success, 2 on usage or input errors, 3 on a corrupt index.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import container
from .bits import CoderKind
from .corpus import extract_patterns, generate, read_corpus, read_patterns, write_corpus, write_patterns
from .errors import CorruptBlock, CorruptIndex, OpmError, PatternTooShort
from .scan import scan_search
from .search import OpmIndex, search
from .transform import Mode

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CORRUPT = 3


def _match_line(ordinal: int, positions) -> str:
    return " ".join([str(ordinal), str(len(positions))] + [str(int(p)) for p in positions])


def _size_table(sizes: dict[str, int]) -> str:
    raw = sizes["raw"]
    rows = [("csa", sizes["csa"]), ("delta", sizes["delta"]), ("total", sizes["total"]), ("raw", raw)]
    lines = [f"{'component':<10}{'bytes':>14}{'ratio':>9}"]
    lines += [f"{name:<10}{size:>14}{size / raw:>9.4f}" for name, size in rows]
    return "\n".join(lines)


def _warm_up(run, patterns) -> None:
    # the first call loads compiled kernels; keep that out of the timings
    if patterns:
        run(patterns[0])


def cmd_build(args) -> int:
    T = read_corpus(args.corpus)
    if args.block < args.q:
        raise OpmError(f"--block {args.block} must be at least --q {args.q}")
    t0 = time.perf_counter()
    idx = OpmIndex.build(T, q=args.q, B=args.block, coder=args.coder, mode=args.mode)
    container.save(idx, args.out)
    elapsed = time.perf_counter() - t0
    print(f"n={idx.n} q={idx.q} B={idx.B} coder={idx.coder.name.lower()} mode={idx.mode.value}")
    print(_size_table(idx.size_breakdown()))
    print(f"# build_ms={1000 * elapsed:.1f}")
    return EXIT_OK


def cmd_search(args) -> int:
    idx = container.load(args.index)
    patterns = read_patterns(args.patterns)
    text = None
    status = EXIT_OK
    _warm_up(lambda P: search(idx, P), [P for P in patterns if P.shape[0] > idx.q])
    for ordinal, P in enumerate(patterns, 1):
        t0 = time.perf_counter()
        try:
            positions, stats = search(idx, P)
        except PatternTooShort as exc:
            if not args.fallback_scan:
                print(f"pattern {ordinal}: {exc}", file=sys.stderr)
                status = EXIT_INPUT
                continue
            if text is None:
                text = idx.decompress()
            t0 = time.perf_counter()
            positions, stats = scan_search(text, P, idx.mode).positions, None
        elapsed = time.perf_counter() - t0
        print(_match_line(ordinal, positions))
        if args.stats:
            if stats is None:
                print(f"# {ordinal} scanned elapsed_ms={1000 * elapsed:.3f}")
            else:
                print(
                    f"# {ordinal} phase1_rows={stats.phase1_rows} phase2_candidates={stats.phase2_candidates}"
                    f" phase1_ratio={stats.phase1_ratio:.4f} phase2_ratio={stats.phase2_ratio:.4f}"
                    f" elapsed_ms={1000 * elapsed:.3f}"
                )
    return status


def cmd_scan(args) -> int:
    T = read_corpus(args.corpus)
    patterns = read_patterns(args.patterns)
    status = EXIT_OK
    _warm_up(lambda P: scan_search(T, P, args.mode), [P for P in patterns if P.shape[0] <= T.shape[0]])
    for ordinal, P in enumerate(patterns, 1):
        if P.shape[0] > T.shape[0]:
            print(f"pattern {ordinal}: longer than the corpus", file=sys.stderr)
            status = EXIT_INPUT
            continue
        report = scan_search(T, P, args.mode)
        print(_match_line(ordinal, report.positions))
        print(f"# {ordinal} elapsed_ms={1000 * report.elapsed:.3f}")
    return status


def cmd_stats(args) -> int:
    idx = container.load(args.index)
    print(f"n={idx.n} q={idx.q} B={idx.B} coder={idx.coder.name.lower()} mode={idx.mode.value}")
    print(_size_table(idx.size_breakdown()))
    for name, size in idx.csa.size_breakdown().items():
        print(f"# csa.{name}={size}")
    print(f"# delta.blocks={idx.deltas.num_blocks}")
    return EXIT_OK


def cmd_gen(args) -> int:
    write_corpus(args.out, generate(args.kind, args.n, args.seed))
    return EXIT_OK


def cmd_extract(args) -> int:
    T = read_corpus(args.corpus)
    write_patterns(args.out, extract_patterns(T, args.count, args.length, args.seed))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opmindex", description="Order-preserving search over compressed integer sequences.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="compress and index a corpus")
    p.add_argument("corpus")
    p.add_argument("out")
    p.add_argument("--q", type=int, default=4, help="window size (default 4)")
    p.add_argument("--block", type=int, default=32, help="block size B (default 32)")
    p.add_argument("--coder", choices=[c.name.lower() for c in CoderKind], default="lsk")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="weak")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="search patterns with an index")
    p.add_argument("index")
    p.add_argument("patterns")
    p.add_argument("--stats", action="store_true", help="print per-phase candidate counts")
    p.add_argument("--fallback-scan", action="store_true", help="scan patterns too short for the index")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("scan", help="search patterns by scanning the corpus")
    p.add_argument("corpus")
    p.add_argument("patterns")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="weak")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("stats", help="show index parameters and sizes")
    p.add_argument("index")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="write a synthetic corpus")
    p.add_argument("kind", choices=["rwalk", "rand"])
    p.add_argument("n", type=int)
    p.add_argument("out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("extract", help="cut random patterns from a corpus")
    p.add_argument("corpus")
    p.add_argument("out")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_extract)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CorruptIndex, CorruptBlock) as exc:
        print(f"opmindex: corrupt index: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (OpmError, OSError) as exc:
        print(f"opmindex: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
