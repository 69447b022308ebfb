"""Command-line entry point: ``binshift <command> [options]``.

Exit codes: 0 success, 1 invalid input, 2 a verification check failed,
3 internal inconsistency (the implementation contradicts a proved claim).
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Optional, Sequence

from .bitstream import parse_descriptor, validate
from .errors import InputError, InternalInconsistency, StructureViolation
from .gf2 import nullity_sequence
from .invariants import census, classify, commutant_index, parse_structure
from .perturbation import family, perturb
from .verify import verify_stream
from .words import central_words, format_word

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; that code means "verification failure" here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


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


def _json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def cmd_nullity(args) -> tuple[int, str]:
    stream = parse_descriptor(args.stream)
    seq = nullity_sequence(stream, args.len)
    report = validate(stream, strict=False)
    try:
        profile = str(parse_structure(seq))
    except StructureViolation:
        if report.ok:
            raise
        profile = "(no structure: stream is not valid)"
    if args.format == "json":
        return EXIT_OK, _json({"descriptor": stream.descriptor, "nullity_seq": list(seq), "structure": profile})
    return EXIT_OK, f"{' '.join(map(str, seq))} | {profile}\n"


def cmd_central(args) -> tuple[int, str]:
    stream = parse_descriptor(args.stream)
    cw = central_words(stream, args.at)
    words = [format_word(w) for w in cw.words]
    if args.format == "json":
        return EXIT_OK, _json({
            "descriptor": stream.descriptor, "n": args.at, "nullity": cw.nullity,
            "center_dimension": cw.center_dimension, "generators": words,
        })
    lines = [f"n={args.at} nullity={cw.nullity} center_dimension={cw.center_dimension}"]
    lines += words or ["(trivial center)"]
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_perturb(args) -> tuple[int, str]:
    stream = parse_descriptor(args.stream)
    validate(stream)
    result = perturb(stream, args.at, check_horizon=max(32, args.emit))
    doc = {
        "descriptor": result.perturbed.descriptor,
        "digits": result.digits(args.emit),
        "first_difference": result.first_difference,
        "u_kind": result.kind.value,
        "z": format_word(result.z),
        "depth": result.d,
        "checks": result.checks,
    }
    if args.format == "json":
        return EXIT_OK, _json(doc)
    flags = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in doc["checks"].items())
    lines = [f"{k}: {doc[k]}" for k in ("descriptor", "digits", "first_difference", "u_kind", "z", "depth")]
    lines.append(f"checks: {flags}")
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_family(args) -> tuple[int, str]:
    stream = parse_descriptor(args.stream)
    validate(stream)
    results = family(stream, args.count, args.limit)
    rows = [{"descriptor": r.perturbed.descriptor, "first_difference": r.first_difference} for r in results]
    if args.format == "json":
        return EXIT_OK, _json({"base": stream.descriptor, "members": rows})
    return EXIT_OK, "".join(f"{r['descriptor']} {r['first_difference']}\n" for r in rows)


def cmd_commutant_index(args) -> tuple[int, str]:
    stream = parse_descriptor(args.stream)
    ci = commutant_index(stream, args.k_max, args.m_max)
    witness = format_word(ci.witness_word) if ci.witness is not None else None
    if args.format == "json":
        return EXIT_OK, _json({
            "descriptor": stream.descriptor, "verdict": str(ci), "kind": ci.kind(),
            "witness": witness, "k_max": ci.k_max, "m_max": ci.m_max,
        })
    out = f"{ci} [{ci.kind()}] combinatorial commutant index"
    if witness is not None:
        out += f", witness {witness}"
    return EXIT_OK, out + "\n"


def _table_output(table, fmt: str) -> str:
    return table.to_json() if fmt == "json" else table.to_csv()


def cmd_census(args) -> tuple[int, str]:
    table = census(args.len, args.k_max, args.m_max, jobs=args.jobs)
    return EXIT_OK, _table_output(table, args.format)


def cmd_classify(args) -> tuple[int, str]:
    streams = [parse_descriptor(d) for d in args.stream]
    for s in streams:
        validate(s)
    table = classify(streams, args.len, args.k_max, args.m_max, jobs=args.jobs)
    return EXIT_OK, _table_output(table, args.format)


def cmd_verify(args) -> tuple[int, str]:
    stream = parse_descriptor(args.stream)
    outcomes = verify_stream(stream, args.len, seed=args.seed)
    failed = [o for o in outcomes if not o.passed]
    if args.format == "json":
        text = _json({
            "descriptor": stream.descriptor,
            "checks": [{"name": o.name, "passed": o.passed, "detail": o.detail} for o in outcomes],
        })
    else:
        text = "".join(o.line() + "\n" for o in outcomes)
        text += f"{len(outcomes) - len(failed)}/{len(outcomes)} checks passed\n"
    return (EXIT_VERIFY if failed else EXIT_OK), text


COMMANDS: dict[str, Callable] = {
    "nullity": cmd_nullity,
    "central": cmd_central,
    "perturb": cmd_perturb,
    "family": cmd_family,
    "commutant-index": cmd_commutant_index,
    "census": cmd_census,
    "verify": cmd_verify,
    "classify": cmd_classify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binshift", description="Binary shifts: nullities, perturbations, invariants.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help, stream=True, fmt=("text", "json")):
        p = sub.add_parser(name, help=help)
        if stream:
            p.add_argument("--stream", required=True, help="stream descriptor, e.g. evp:01/0")
        p.add_argument("--format", choices=fmt, default=fmt[0])
        p.add_argument("--out", help="write output here instead of stdout")
        return p

    add("nullity", "nullities nu_1..nu_N and their string structure").add_argument(
        "--len", type=_positive, required=True)
    add("central", "generators of the center at n").add_argument("--at", type=_positive, required=True)

    p = add("perturb", "perturb the shift at a break point")
    p.add_argument("--at", type=_positive, required=True)
    p.add_argument("--emit", type=_positive, default=32)

    p = add("family", "perturbations at the first k break points")
    p.add_argument("--count", type=_positive, required=True)
    p.add_argument("--limit", type=_positive, default=256, help="largest break point to consider")

    for name, help, stream in (
        ("commutant-index", "combinatorial commutant index", True),
        ("census", "classify every prefix of length L", False),
        ("classify", "classify the given streams", False),
    ):
        fmt = ("text", "json") if name == "commutant-index" else ("csv", "json")
        p = add(name, help, stream=stream, fmt=fmt)
        p.add_argument("--k-max", type=_positive, default=64)
        p.add_argument("--m-max", type=_positive, default=24)
        if name != "commutant-index":
            p.add_argument("--len", type=_positive, required=True)
            p.add_argument("--jobs", type=_positive, default=1)
        if name == "classify":
            p.add_argument("--stream", action="append", required=True, help="repeat for several streams")

    p = add("verify", "run every structural check on one stream")
    p.add_argument("--len", type=_positive, default=16)
    p.add_argument("--seed", type=_nonnegative, default=0)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str, str]:
    """Execute one invocation; returns (exit code, stdout text, stderr text)."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    try:
        code, text = COMMANDS[args.command](args)
    except InternalInconsistency as exc:
        dump = _json(exc.dump) if getattr(exc, "dump", None) else ""
        return EXIT_INTERNAL, "", f"internal inconsistency: {exc}\n{dump}"
    except StructureViolation as exc:
        return EXIT_INTERNAL, "", f"internal inconsistency: {exc}\n"
    except InputError as exc:
        return EXIT_INPUT, "", f"error: {exc}\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        text = ""
    return code, text, ""


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
