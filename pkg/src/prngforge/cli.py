"""Command-line entry point: ``prngforge {gen,bench,test,list-multipliers}``.

Data goes to stdout (or ``--out``), diagnostics to stderr. Exit codes: 0 success,
1 I/O or budget failure, 2 invalid flags or unsupported combinations, 3 a failed
test battery.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Sequence

import numpy as np

from prngforge import __version__, bench, kernels, stats
from prngforge.core import GeneratorKind, to_uniform
from prngforge.params import SUPPORTED_BASE_BITS, enumerate_multipliers
from prngforge.streams import JUMPABLE, EnsembleConfig, Scheme, generate_ensemble, row_to_state, state_to_row

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_TEST_FAILED = 3

RNG_NAMES = {
    "mwc": GeneratorKind.MWC,
    "xorshift": GeneratorKind.XORSHIFT256,
    "kiss": GeneratorKind.KISS,
    "lcg": GeneratorKind.LCG,
    "shr3": GeneratorKind.SHR3,
}

SCHEME_NAMES = {"param": Scheme.PARAMETERIZE, "split": Scheme.SPLIT, "leapfrog": Scheme.LEAPFROG}

FORMATS = ("u32le", "hex", "text", "f32text")

STATE_HEADER = "prngforge-state v1"


class UsageError(Exception):
    """Bad flag combination detected after parsing; maps to exit 2."""


def _positive(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return v


def _yes_no(text: str) -> bool:
    if text not in ("yes", "no"):
        raise argparse.ArgumentTypeError(f"expected yes or no, got {text!r}")
    return text == "yes"


def _test_rng(text: str) -> str:
    # the counter kind is a sanity hook for the battery and is left out of --help
    if text == stats.COUNTER_KIND:
        return text
    if text not in RNG_NAMES:
        raise argparse.ArgumentTypeError(f"invalid choice {text!r} (choose from {', '.join(RNG_NAMES)})")
    return RNG_NAMES[text].value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prngforge", description="Parallel pseudo-random number generators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    g = sub.add_parser("gen", help="generate values on parallel streams")
    g.add_argument("--rng", choices=RNG_NAMES, required=True)
    g.add_argument("--streams", type=_positive, default=1)
    g.add_argument("--count", type=_positive, required=True, help="values per stream")
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument(
        "--scheme", choices=SCHEME_NAMES, default=None,
        help="default: split for lcg and xorshift, param otherwise",
    )
    g.add_argument("--format", choices=FORMATS, default="text")
    g.add_argument("--out", default=None, help="output file (default stdout)")
    g.add_argument("--save-state", action="store_true", help="write final states to OUT.state")
    g.add_argument("--workers", type=_positive, default=1)

    b = sub.add_parser("bench", help="time generation with and without writeback")
    b.add_argument("--rng", choices=RNG_NAMES, required=True)
    b.add_argument("--n-per-stream", type=_positive, default=78_125)
    b.add_argument("--streams", type=_positive, default=1024)
    b.add_argument("--writeback", type=_yes_no, default=True, metavar="{yes,no}")
    b.add_argument("--uniform", type=_yes_no, default=False, metavar="{yes,no}")
    b.add_argument("--workers", type=_positive, default=1)
    b.add_argument("--repeats", type=_positive, default=5)
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--budget-mb", type=_positive, default=bench.DEFAULT_BUDGET_BYTES >> 20,
                   help="largest writeback buffer allowed, in MiB")
    b.add_argument("--machine", action="store_true", help="print a CSV row instead of the table")

    t = sub.add_parser("test", help="run the statistical test battery")
    t.add_argument("--rng", type=_test_rng, required=True, metavar="{" + ",".join(RNG_NAMES) + "}")
    t.add_argument("--n", type=_positive, default=None, help="words to test (default: level minimum)")
    t.add_argument("--level", choices=stats.LEVELS, default="quick")
    t.add_argument("--seed", type=_seed, default=0)
    t.add_argument("--machine", action="store_true", help="print CSV instead of the text report")

    m = sub.add_parser("list-multipliers", help="list MWC multipliers a with a*2^bits-1 a safeprime")
    m.add_argument("--base-bits", type=int, choices=SUPPORTED_BASE_BITS, default=16)
    m.add_argument("--count-only", action="store_true")
    m.add_argument("--check", type=int, nargs="+", metavar="A", help="report membership of these multipliers")
    return p


def _default_scheme(kind: GeneratorKind) -> Scheme:
    return Scheme.SPLIT if kind in JUMPABLE else Scheme.PARAMETERIZE


def format_values(values: np.ndarray, fmt: str) -> bytes:
    """Encode a stream-major array of words in one of the output formats."""
    flat = np.ascontiguousarray(values, dtype=np.uint32).ravel()
    if fmt == "u32le":
        return flat.astype("<u4").tobytes()
    if fmt == "hex":
        lines = [format(v, "08x") for v in flat.tolist()]
    elif fmt == "text":
        lines = [str(v) for v in flat.tolist()]
    elif fmt == "f32text":
        lines = [np.format_float_positional(x, unique=True, trim="0") for x in to_uniform(flat)]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return ("\n".join(lines) + "\n").encode("ascii") if lines else b""


def format_state_file(kind: GeneratorKind, states: Sequence) -> str:
    """Versioned header, then every stream's state words in decimal, one per line."""
    lines = [f"{STATE_HEADER} {kind.value}"]
    for s in states:
        lines += [str(int(w)) for w in state_to_row(s)[1]]
    return "\n".join(lines) + "\n"


_ROW_CODES = {
    GeneratorKind.MWC: kernels.MWC,
    GeneratorKind.XORSHIFT256: kernels.XORSHIFT,
    GeneratorKind.SHR3: kernels.SHR3,
    GeneratorKind.LCG: kernels.LCG,
    GeneratorKind.KISS: kernels.KISS,
}


def parse_state_file(text: str) -> list:
    """Inverse of :func:`format_state_file`."""
    lines = text.splitlines()
    head = lines[0].rsplit(" ", 1) if lines else []
    if len(head) != 2 or head[0] != STATE_HEADER:
        raise ValueError("not a prngforge-state v1 file")
    kind = GeneratorKind(head[1])
    code = _ROW_CODES[kind]
    width = kernels.ROW_WIDTH[code]
    words = [int(x) for x in lines[1:] if x.strip()]
    if len(words) % width:
        raise ValueError(f"{len(words)} state words is not a multiple of {width}")
    return [row_to_state(code, words[i : i + width]) for i in range(0, len(words), width)]


def cmd_gen(args) -> int:
    kind = RNG_NAMES[args.rng]
    scheme = _default_scheme(kind) if args.scheme is None else SCHEME_NAMES[args.scheme]
    if args.save_state and args.out is None:
        raise UsageError("--save-state needs --out, the state file is written next to it")
    cfg = EnsembleConfig(kind, args.streams, args.count, args.seed, scheme, args.workers)
    result = generate_ensemble(cfg)
    data = format_values(result.values, args.format)
    if args.out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(args.out, "wb") as fh:
            fh.write(data)
    if args.save_state:
        with open(args.out + ".state", "w", encoding="ascii") as fh:
            fh.write(format_state_file(kind, result.final_states))
    return EXIT_OK


def cmd_bench(args) -> int:
    report = bench.run_benchmark(
        RNG_NAMES[args.rng], args.n_per_stream, args.streams,
        writeback=args.writeback, uniform=args.uniform, repeats=args.repeats,
        workers=args.workers, seed=args.seed, budget_bytes=args.budget_mb << 20,
    )
    sys.stdout.write(bench.emit_report(report, "csv" if args.machine else "text"))
    return EXIT_OK


def cmd_test(args) -> int:
    minimum = stats.LEVELS[args.level][0]
    n = minimum if args.n is None else args.n
    if n < minimum:
        raise UsageError(f"--n {n} is below the {args.level} level minimum of {minimum}")
    results = stats.run_battery(args.rng, n, args.level, args.seed)
    sys.stdout.write(stats.format_report(results, machine=args.machine))
    return EXIT_TEST_FAILED if stats.summary_verdict(results) == "fail" else EXIT_OK


def cmd_list_multipliers(args) -> int:
    table = enumerate_multipliers(args.base_bits)
    if args.check:
        members = set(table.multipliers)
        for a in args.check:
            sys.stdout.write(f"{a} {'yes' if a in members else 'no'}\n")
    elif args.count_only:
        sys.stdout.write(f"{len(table.multipliers)}\n")
    else:
        sys.stdout.write(table.to_text())
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "bench": cmd_bench,
    "test": cmd_test,
    "list-multipliers": cmd_list_multipliers,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except bench.BudgetExceededError as exc:
        print(f"prngforge: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        # SchemeError, InvalidStateError and InsufficientSamplesError are ValueErrors
        print(f"prngforge {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"prngforge: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
