"""fblb-plot: render a figure from a harness results CSV.

    fblb-plot --csv results.csv --kind separation --out figure.svg
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, EmptyInputError, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fblb-plot",
        description="Render experiment figures from fullbatch-lb CSV output.",
    )
    parser.add_argument("--csv", required=True, help="input results CSV")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output .svg or .png path")
    parser.add_argument("--x-scale", default=None, choices=("linear", "log"))
    parser.add_argument("--y-scale", default=None, choices=("linear", "log"))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            csv_path=args.csv, kind=args.kind, out_path=args.out,
            x_scale=args.x_scale, y_scale=args.y_scale,
        )
        out = render(spec)
    except (SchemaError, EmptyInputError, OSError, ValueError) as error:
        print(f"fblb-plot: error: {error}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
