"""Rendering CLI.

torusplots render --kind <field|convergence|condition> --in <csv> --out <png>

Exit codes mirror the solver CLI: 0 success, 2 unusable input, 3 render
failure.
"""

import argparse
import sys

from .io import PlotInputError
from .render import render_condition, render_convergence, render_field


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="torusplots",
        description="Render solver CSV exports as PNG figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    render = sub.add_parser("render", help="render one export to a PNG")
    render.add_argument("--kind", required=True,
                        choices=("field", "convergence", "condition"))
    render.add_argument("--in", dest="input", required=True, metavar="CSV")
    render.add_argument("--out", required=True, metavar="PNG")
    render.add_argument(
        "--tiles", type=int, default=3,
        help="periodic copies per axis for field renders (default 3)")
    args = parser.parse_args(argv)

    if args.tiles < 1:
        print("torusplots: input error: tiles must be >= 1", file=sys.stderr)
        return 2
    try:
        if args.kind == "field":
            render_field(args.input, args.out, tiles=args.tiles)
        elif args.kind == "convergence":
            render_convergence(args.input, args.out)
        else:
            render_condition(args.input, args.out)
    except PlotInputError as e:
        print(f"torusplots: input error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"torusplots: render error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
