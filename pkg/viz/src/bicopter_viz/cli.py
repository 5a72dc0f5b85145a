"""Command line for figure rendering: `bicopter-viz render --log L --out D`."""
from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, EmptyLogError, FigureSpec, LogSchemaError, render_figures

EXIT_OK = 0
EXIT_INPUT = 2


def cmd_render(args) -> int:
    figures = tuple(args.figs.split(",")) if args.figs else FIGURES
    try:
        spec = FigureSpec(log_path=args.log, out_dir=args.out, figures=figures)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        written = render_figures(spec)
    except (LogSchemaError, EmptyLogError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for path in written:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicopter-viz",
        description="Render result figures from bicopter-safe scenario logs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render figures from a log")
    p_render.add_argument("--log", required=True, help="scenario log (CSV)")
    p_render.add_argument("--out", required=True, help="output directory")
    p_render.add_argument("--figs", default=None,
                          help=f"comma-separated subset of {','.join(FIGURES)}")
    p_render.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
