"""Script surface: one sweep CSV in, one image file out.

Exit codes follow the producer's convention: 0 on success, 1 for
validation problems (bad flags, schema mismatches, empty inputs), 2 for
runtime failures while writing the image.  Errors go to stderr as one
JSON object per failure.
"""

import argparse
import json
import sys

from .plots import KINDS, METRICS, PlotSpec, render
from .schema import SchemaError


def _parser():
    parser = argparse.ArgumentParser(
        prog="qdiode-figs",
        description="Render a figure from a qdiode sweep CSV.",
    )
    parser.add_argument("csv", help="sweep CSV path")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--value", default="r1", choices=METRICS,
                        help="metric column to plot (default r1)")
    parser.add_argument("--title", default="")
    parser.add_argument("--x-label", default="")
    parser.add_argument("--y-label", default="")
    return parser


def _fail(message, kind):
    print(json.dumps({"error": message, "kind": kind}), file=sys.stderr)


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the usage message
        return 0 if exc.code == 0 else 1
    try:
        spec = PlotSpec(
            csv_path=args.csv,
            kind=args.kind,
            out_path=args.out,
            value=args.value,
            title=args.title,
            x_label=args.x_label,
            y_label=args.y_label,
        )
        written = render(spec)
    except (SchemaError, ValueError) as exc:
        _fail(str(exc), "validation")
        return 1
    except OSError as exc:
        _fail(str(exc), "runtime")
        return 2
    print(written)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
