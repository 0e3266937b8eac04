"""Command-line interface.

Subcommands:

* ``rates``   print or export the rate vector of a stationary gap law
* ``sample``  draw gap configurations from a law as CSV
* ``verify``  run an experiment config and report verdicts

Exit codes: 0 success, N >= 1 the number of failed (non-exploratory)
experiments for ``verify``, 2 usage or config errors.  Every run echoes its
fully resolved configuration (defaults and seeds included) into its outputs.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments, laws
from .drifts import BUILTIN_DRIFTS, DriftSpec
from .rng import RngSpec

USAGE_EXIT = 2


def _drift_from_arg(text: str) -> DriftSpec:
    if text in BUILTIN_DRIFTS:
        return BUILTIN_DRIFTS[text]
    try:
        return DriftSpec.from_dict(json.loads(text))
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(
            f"{text!r} is neither a builtin drift name ({', '.join(sorted(BUILTIN_DRIFTS))}) "
            f'nor a JSON object like {{"prefix": [1.0], "tail": 0.0}}: {exc}'
        )


def _law_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--drift-spec",
        type=_drift_from_arg,
        required=True,
        help="builtin name (atlas, driftless, inverted-atlas) or JSON prefix/tail object",
    )
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--N", type=int, help="finite system size (its unique stationary law)")
    group.add_argument("--m", type=int, help="approximating system parameter (m^2 particles)")
    parser.add_argument("--a", type=float, help="family parameter; required unless --N is given")
    parser.add_argument(
        "--n", type=int, default=laws.DEFAULT_DEPTH,
        help="truncation depth of the infinite family (default %(default)s)",
    )
    parser.add_argument(
        "--allow-degenerate", action="store_true",
        help="admit the boundary member a=0 (needs positive drift partial sums)",
    )


def _resolve_law(args) -> tuple[laws.GapLaw, dict]:
    drift = args.drift_spec
    if args.N is not None:
        law = laws.finite_stationary_rates(drift, args.N)
        resolved = {"family": "finite", "N": args.N}
    elif args.m is not None:
        if args.a is None:
            raise laws.StationarityBoundError("--m needs --a", bound=float("nan"))
        law = laws.approximant(drift, args.a, args.m).gap_law()
        resolved = {"family": "approximant", "a": args.a, "m": args.m}
    else:
        if args.a is None:
            raise laws.StationarityBoundError(
                "one of --a (with optional --n), --N or --m is required", bound=float("nan")
            )
        law = laws.infinite_rates(drift, args.a, args.n, allow_degenerate=args.allow_degenerate)
        resolved = {"family": "infinite", "a": args.a, "n": args.n}
    resolved["drift"] = drift.to_dict()
    return law, resolved


def _fmt_rate(x: float) -> str:
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def _cmd_rates(args) -> int:
    try:
        law, resolved = _resolve_law(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    if args.out:
        law.to_csv(args.out)
        with open(args.out + ".config.json", "w", encoding="utf-8") as fh:
            json.dump(resolved, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {len(law)} rates to {args.out}")
    else:
        print(",".join(_fmt_rate(r) for r in law.rates))
    return 0


def _cmd_sample(args) -> int:
    if args.count < 1:
        print(f"error: --count must be >= 1, got {args.count}", file=sys.stderr)
        return USAGE_EXIT
    try:
        law, resolved = _resolve_law(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    resolved.update({"count": args.count, "seed": args.seed, "stream": args.stream})
    samples = laws.sample_gaps(law, args.count, RngSpec(args.seed, args.stream))
    header = ",".join(f"gap_{k + 1}" for k in range(samples.shape[1]))
    lines = [f"# {json.dumps(resolved, sort_keys=True)}", header]
    lines += [",".join(repr(float(v)) for v in row) for row in samples]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.count} samples to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    try:
        specs = experiments.load_config(args.config)
        reports = experiments.run_suite(specs, args.out, only=args.only)
    except experiments.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    width = max(len(r.name) for r in reports)
    failed = 0
    for report in reports:
        if report.exploratory:
            status = "EXPL"
        elif report.passed:
            status = "PASS"
        else:
            status = "FAIL"
            failed += 1
        worst = min(
            (c for c in report.checks),
            key=lambda c: (c.passed is not False, c.name),
        )
        print(
            f"{report.name:<{width}}  {status}  kind={report.kind}  "
            f"checks={len(report.checks)}  {worst.name}={worst.statistic!r}"
        )
    print(f"{len(reports)} experiments, {failed} failed; outputs in {args.out}")
    return failed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbpsim",
        description="Competing Brownian particles: stationary gap laws, simulation, verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rates = sub.add_parser("rates", help="rates of a stationary gap law")
    _law_flags(p_rates)
    p_rates.add_argument("--out", help="write CSV (k,lambda_k,mean_k) here instead of stdout")
    p_rates.set_defaults(func=_cmd_rates)

    p_sample = sub.add_parser("sample", help="draw gap configurations from a law")
    _law_flags(p_sample)
    p_sample.add_argument("--count", type=int, required=True, help="number of configurations")
    p_sample.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p_sample.add_argument("--stream", type=int, default=0, help="stream id (default 0)")
    p_sample.add_argument("--out", help="output CSV path (default: stdout)")
    p_sample.set_defaults(func=_cmd_sample)

    p_verify = sub.add_parser("verify", help="run an experiment config")
    p_verify.add_argument("--config", required=True, help="experiment config (JSON)")
    p_verify.add_argument("--out", required=True, help="output directory")
    p_verify.add_argument("--only", help="run a single experiment by name")
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
