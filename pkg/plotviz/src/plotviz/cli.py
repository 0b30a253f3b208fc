"""Command-line entry: wurmac-plot render --exhibit figN --csv in.csv --out out.png"""

from __future__ import annotations

import argparse
import sys

from .render import EXHIBITS, RenderError, recipe_for, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wurmac-plot",
                                     description="Render wurmac experiment CSVs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="draw one exhibit from its CSV")
    p.add_argument("--exhibit", required=True, help=f"one of {', '.join(EXHIBITS)}")
    p.add_argument("--csv", required=True, help="input CSV (wurmac figure output)")
    p.add_argument("--out", required=True, help="image path (.png, .pdf, .svg)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(recipe_for(args.exhibit, args.csv), args.out)
    except (RenderError, OSError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
