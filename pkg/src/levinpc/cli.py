"""Command-line front end.

Examples::

    levinpc gen --len 74 --format txt
    levinpc paircorr --N 4096 --s 1/2
    levinpc paircorr --block-d 3
    levinpc discrepancy --N-list 1024 4096 --format csv
    levinpc verify --d-max 2
    levinpc bound --d-list 2,3,4 --format csv
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import combinatorics, stats
from .errors import LevinError, ResourceLimitError, ValidationError
from .necklace import LEVIN, ConstantSpec, NecklaceSpec, DigitStream, bits_to_str, load_constant_spec, pack_bits

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

REPORT_FORMATS = {
    "gen": ("txt", "bin"),
    "paircorr": ("json", "csv", "txt"),
    "discrepancy": ("json", "csv", "txt"),
    "verify": ("json", "txt"),
    "bound": ("json", "csv", "txt"),
}

#: Case-2 necklaces exercised by ``verify`` alongside Levin's blocks.
CASE2_SPECS = {
    1: NecklaceSpec(1, (1, 0), "00"),
    2: NecklaceSpec(2, (3, 2, 1, 0), "0000"),
    3: NecklaceSpec(3, (4, 3, 3, 2, 2, 1, 1, 0), "00000000"),
}


def _int_list(values: list[str]) -> list[int]:
    out = []
    for v in values:
        out.extend(int(x) for x in v.split(",") if x)
    return out


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("s must be positive")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levinpc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--spec", help="constant-spec JSON file (default: Levin's constant)")
        p.add_argument("--format", default=default_format)
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--workers", type=_positive, default=1)

    p = sub.add_parser("gen", help="emit binary digits of the constant")
    p.add_argument("--len", dest="length", type=_nonnegative, required=True)
    p.add_argument("--start", type=_nonnegative, default=0)
    common(p, "txt")

    p = sub.add_parser("paircorr", help="certified pair-correlation statistic F_N(s)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--N", type=int)
    group.add_argument("--block-d", type=_nonnegative)
    p.add_argument("--s", type=_rational, default=None)
    common(p, "json")

    p = sub.add_parser("discrepancy", help="star discrepancy for a list of N")
    p.add_argument("--N-list", nargs="+", required=True)
    common(p, "json")

    p = sub.add_parser("verify", help="run lemma and counting suites")
    p.add_argument("--d-max", type=_nonnegative, required=True)
    common(p, "json")

    p = sub.add_parser("bound", help="lower bound joined with empirical F_N(2)")
    p.add_argument("--d-list", nargs="+", required=True)
    p.add_argument("--no-empirical", action="store_true")
    common(p, "json")
    return parser


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def _rows_txt(rows: list[dict]) -> str:
    return "".join("  ".join(f"{k}={v}" for k, v in row.items()) + "\n" for row in rows)


def emit_report(report, fmt: str) -> str:
    """Serialize a report or list of reports.

    Anything with ``to_dict`` is accepted; lists become one row per item.
    """
    if fmt not in ("json", "csv", "txt"):
        raise ValueError(f"unsupported format {fmt!r}")
    many = isinstance(report, (list, tuple))
    rows = [r.to_dict() if hasattr(r, "to_dict") else r for r in (report if many else [report])]
    if fmt == "json":
        return json.dumps(rows if many else rows[0], indent=2) + "\n"
    if fmt == "csv":
        if any(isinstance(v, (dict, list)) for row in rows for v in row.values()):
            raise ValueError("report is nested and cannot be written as csv")
        return _rows_csv(rows)
    return _rows_txt(rows)


def _load_spec(path: str | None) -> ConstantSpec:
    return LEVIN if path is None else load_constant_spec(path)


def _run_verify(d_max: int) -> dict:
    lemmas = combinatorics.verify_lemmas(min(d_max, 3))
    counting = []
    for d in range(1, min(d_max, combinatorics.MAX_TARGET_D) + 1):
        for nk in (NecklaceSpec.levin(d), CASE2_SPECS[d]):
            counting.append(combinatorics.verify_counting(nk).to_dict())
    identity = {n: combinatorics.binom_identity_check(n) for n in range(2, 21)}
    passed = lemmas.passed and all(c["passed"] for c in counting) and all(identity.values())
    return {
        "passed": passed,
        "d_max": d_max,
        "lemmas": lemmas.to_dict(),
        "counting": counting,
        "binom_identity": {"n_range": [2, 20], "passed": all(identity.values())},
    }


def execute(args: argparse.Namespace) -> tuple[int, bytes]:
    """Run a parsed command; return (exit status, artifact bytes)."""
    allowed = REPORT_FORMATS[args.command]
    if args.format not in allowed:
        raise ValueError(f"--format for {args.command} must be one of {', '.join(allowed)}")
    spec = _load_spec(args.spec)

    if args.command == "gen":
        bits = DigitStream(spec).digits(args.start, args.length, workers=args.workers)
        if args.format == "bin":
            return EXIT_OK, pack_bits(bits)
        return EXIT_OK, (bits_to_str(bits) + "\n").encode()

    if args.command == "paircorr":
        if args.block_d is not None:
            if args.s is not None:
                raise ValueError("--s is fixed to 2 with --block-d")
            rep = stats.block_pair_correlation(spec, args.block_d, workers=args.workers)
        else:
            if args.N < 2:
                raise ValueError("--N must be at least 2")
            rep = stats.pair_correlation(spec, args.N, args.s or Fraction(1), workers=args.workers)
        status = EXIT_OK if rep.certified else EXIT_FAILED
        return status, emit_report(rep, args.format).encode()

    if args.command == "discrepancy":
        ns = _int_list(args.N_list)
        if not ns or min(ns) < 1:
            raise ValueError("--N-list entries must be positive")
        rows = [stats.star_discrepancy(spec, n, workers=args.workers) for n in ns]
        return EXIT_OK, emit_report(rows, args.format).encode()

    if args.command == "verify":
        result = _run_verify(args.d_max)
        if args.format == "txt":
            text = f"passed={result['passed']} lemmas={result['lemmas']['checks']}\n"
        else:
            text = json.dumps(result, indent=2) + "\n"
        return (EXIT_OK if result["passed"] else EXIT_FAILED), text.encode()

    if args.command == "bound":
        ds = _int_list(args.d_list)
        if not ds or min(ds) < 1:
            raise ValueError("--d-list entries must be positive")
        rows = [
            combinatorics.bound_report(d, spec, empirical=not args.no_empirical, workers=args.workers)
            for d in ds
        ]
        failed = any(r.met is False for r in rows)
        return (EXIT_FAILED if failed else EXIT_OK), emit_report(rows, args.format).encode()

    raise AssertionError(args.command)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status, payload = execute(args)
    except ResourceLimitError as exc:
        print(f"levinpc: refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValidationError as exc:
        print(f"levinpc: invalid input: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ValueError, OSError, LevinError) as exc:
        print(f"levinpc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
