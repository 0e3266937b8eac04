"""Command line for figure generation from experiment outputs."""

from __future__ import annotations

import argparse
import sys

from .gap_fit import plot_gap_fit
from .growth import plot_growth
from .io import SchemaError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="reportplots", description="SVG figures from cbpsim raw.csv / verdict.json outputs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gap = sub.add_parser("gap-fit", help="gap histograms with fitted exponential densities")
    p_gap.add_argument("raw_csv")
    p_gap.add_argument("verdict_json")
    p_gap.add_argument("out_svg")

    p_growth = sub.add_parser("growth", help="log particle-count growth lines")
    p_growth.add_argument("raw_csv")
    p_growth.add_argument("out_svg")
    p_growth.add_argument("--x-range", nargs=2, type=float, metavar=("LO", "HI"))

    args = parser.parse_args(argv)
    try:
        if args.command == "gap-fit":
            plot_gap_fit(args.raw_csv, args.verdict_json, args.out_svg)
        else:
            x_range = tuple(args.x_range) if args.x_range else None
            plot_growth(args.raw_csv, args.out_svg, x_range=x_range)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out_svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
