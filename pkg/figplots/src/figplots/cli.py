"""Command-line figure renderer for bms result CSVs.

    bms-plot --csv results/ucb-grid.csv --metric regret --out figures/ucb.svg

Vector output (svg/pdf) is the default; pass --format png for raster.
Exits 1 with the offending row number on malformed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import CsvFormatError, PlotSpec, RASTER_FORMATS, VECTOR_FORMATS, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bms-plot", description="Render figures from bms result CSVs")
    parser.add_argument("--csv", type=Path, required=True, help="input result CSV")
    parser.add_argument("--metric", choices=("regret", "opt_rate"), required=True)
    parser.add_argument("--out", type=Path, required=True, help="output image path")
    parser.add_argument("--title", default=None)
    parser.add_argument(
        "--format",
        choices=VECTOR_FORMATS + RASTER_FORMATS,
        default=None,
        help="output format (default: from the --out suffix, falling back to svg)",
    )
    parser.add_argument("--dpi", type=int, default=150, help="raster resolution")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out
    if args.format is not None:
        out = out.with_suffix(f".{args.format}")
    elif not out.suffix:
        out = out.with_suffix(".svg")
    try:
        result = render(PlotSpec(csv_path=args.csv, metric=args.metric, out_path=out, title=args.title, dpi=args.dpi))
    except FileNotFoundError as exc:
        print(f"bms-plot: {exc}", file=sys.stderr)
        return 1
    except CsvFormatError as exc:
        print(f"bms-plot: malformed CSV {args.csv}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"bms-plot: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} ({result.num_series} series)")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
