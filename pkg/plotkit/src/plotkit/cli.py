"""Batch figure CLI.

    plot --hist histograms.csv --fits fits.csv --observable qy_star --out fig.png

Exit codes: 0 success, 1 bad arguments or missing data, 3 I/O error.
"""

import argparse
import sys

from .figures import OBSERVABLES, FigureSpec, PlotError, render

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IO = 3


def build_parser():
    ap = argparse.ArgumentParser(prog="plot")
    ap.add_argument("--hist", required=True, help="path to histograms.csv")
    ap.add_argument("--fits", required=True, help="path to fits.csv")
    ap.add_argument("--observable", required=True, choices=OBSERVABLES)
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument(
        "--sigma2", type=float, action="append",
        help="restrict to this variance (repeatable; default: all in the CSV)",
    )
    ap.add_argument("--no-overlay", action="store_true", help="points only, no fitted curve")
    ap.add_argument("--format", help="image format (default: from --out extension)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec_kwargs = dict(
        observable=args.observable,
        out_path=args.out,
        overlay=not args.no_overlay,
        fmt=args.format,
    )
    if args.sigma2:
        spec_kwargs["sigma2s"] = tuple(args.sigma2)
    try:
        path = render(args.hist, args.fits, FigureSpec(**spec_kwargs))
    except PlotError as e:
        print(f"plot error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
