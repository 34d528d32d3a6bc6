"""Command-line interface.

Subcommands: convert, verify, equiv, generate, bench. Exit codes:
0 success, 1 conversion failure, 2 invalid input, 3 verification failure,
4 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .behavior import bounded_equal, check_safe, check_sound, enumerate_language
from .convert import ConversionOptions, convert, convert_and_verify
from .generate import GenParams, bench_csv, bench_run, generate_separable_net
from .nets import NetStructureError
from .powl import PowlStructureError, language_bounded
from .powl_io import parse_powl, serialize_powl
from .pnml import NotAWorkflowNet, ParseError, UnsupportedFeature, parse_pnml, write_pnml
from .preprocess import RuleFlags, preprocess

EXIT_OK = 0
EXIT_CONVERSION_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_VERIFICATION_FAILED = 3
EXIT_INTERNAL = 4


def _load_net(path: str):
    return parse_pnml(Path(path).read_bytes())


def _conversion_options(args) -> ConversionOptions:
    return ConversionOptions(preprocess=not args.no_preprocess,
                             verify_projections=getattr(args, "verify_projections", False))


def _cmd_convert(args) -> int:
    wf = _load_net(args.input)
    opts = _conversion_options(args)
    if not args.no_preprocess and args.rules != "dup,split,join":
        # custom rule subset: run the reduction here, then convert as-is
        wf = preprocess(wf, RuleFlags.parse(args.rules))
        opts = ConversionOptions(preprocess=False,
                                 verify_projections=opts.verify_projections)
    if args.verify is not None:
        report = convert_and_verify(wf, opts, max_len=args.verify)
    else:
        report = convert(wf, opts)
    if not report.ok:
        print(f"conversion failed: {report.failure}", file=sys.stderr)
        if args.fail_diagnostics:
            Path(args.fail_diagnostics).write_bytes(
                write_pnml(report.failure.fragment, net_id="irreducible"))
            print(f"irreducible fragment written to {args.fail_diagnostics}",
                  file=sys.stderr)
        return EXIT_CONVERSION_FAILED
    payload = serialize_powl(report.result)
    if args.output:
        Path(args.output).write_bytes(payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    if report.equivalence is not None and not report.equivalence:
        print(f"language mismatch at bound {report.equivalence.bound}: "
              f"trace {report.equivalence.counterexample} missing from "
              f"{report.equivalence.missing_from}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def _cmd_verify(args) -> int:
    wf = _load_net(args.input)
    safe = check_safe(wf, state_budget=args.states)
    sound = check_sound(wf, state_budget=args.states)
    print(f"safeness: {safe}")
    print(f"soundness: {sound}")
    if safe.is_safe and sound.is_sound:
        return EXIT_OK
    return EXIT_VERIFICATION_FAILED


def _cmd_equiv(args) -> int:
    wf = _load_net(args.input)
    model = parse_powl(Path(args.model).read_bytes())
    verdict = bounded_equal(enumerate_language(wf, args.max_len),
                            language_bounded(model, args.max_len))
    if verdict:
        print(f"equal at bound {verdict.bound}")
        return EXIT_OK
    print(f"not equal at bound {verdict.bound}: trace {verdict.counterexample} "
          f"missing from {verdict.missing_from}")
    return EXIT_VERIFICATION_FAILED


def _cmd_generate(args) -> int:
    params = GenParams(seed=args.seed, target_transitions=args.transitions,
                       max_depth=args.depth)
    wf, model = generate_separable_net(params)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"net_s{args.seed}_t{args.transitions}"
    (out / f"{stem}.pnml").write_bytes(write_pnml(wf, net_id=stem))
    (out / f"{stem}.powl.json").write_bytes(serialize_powl(model))
    print(f"wrote {out / stem}.pnml and {out / stem}.powl.json")
    return EXIT_OK


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = bench_run(sizes, args.per_size)
    text = bench_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        sys.stdout.write(text)
    failures = [r for r in rows if not r.success]
    if failures:
        print(f"{len(failures)} of {len(rows)} conversions failed", file=sys.stderr)
        return EXIT_CONVERSION_FAILED
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wf2powl",
        description="Transform safe and sound workflow nets into POWL 2.0 models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a PNML net into a POWL model")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--no-preprocess", action="store_true")
    p.add_argument("--rules", default="dup,split,join",
                   help="comma-separated preprocessing rules (dup,split,join)")
    p.add_argument("--verify", type=int, metavar="L",
                   help="check bounded language equality at visible length L")
    p.add_argument("--verify-projections", action="store_true")
    p.add_argument("--fail-diagnostics", metavar="PATH",
                   help="on failure, dump the irreducible fragment as PNML")
    p.set_defaults(run=_cmd_convert)

    p = sub.add_parser("verify", help="check safeness and soundness")
    p.add_argument("input")
    p.add_argument("--states", type=int, default=1_000_000,
                   help="state-space exploration budget")
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("equiv", help="compare a net and a model at a length bound")
    p.add_argument("input")
    p.add_argument("model")
    p.add_argument("--max-len", type=int, default=8)
    p.set_defaults(run=_cmd_equiv)

    p = sub.add_parser("generate", help="emit a random separable net + reference model")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--transitions", type=int, default=20)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(run=_cmd_generate)

    p = sub.add_parser("bench", help="run the scalability benchmark")
    p.add_argument("--sizes", default="25,50,100,200,350")
    p.add_argument("--per-size", type=int, default=5)
    p.add_argument("--csv", help="write the result table to this file")
    p.set_defaults(run=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.run(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (ParseError, NotAWorkflowNet, UnsupportedFeature,
            NetStructureError, PowlStructureError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
