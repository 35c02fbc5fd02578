"""Command-line front end: prefsim-plots --summary <csv> --metric accuracy --out <dir>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import DEFAULT_FACET_KEYS, MissingColumnError, PlotSpec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="prefsim-plots",
        description="Render metric-vs-comparisons panels from a prefsim summary CSV.",
    )
    parser.add_argument("--summary", required=True, help="path to summary.csv")
    parser.add_argument(
        "--metric",
        default="accuracy",
        choices=("accuracy", "norm_distance"),
        help="which metric column to plot",
    )
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument("--format", default="svg", choices=("svg", "png"),
                        help="image format (default svg)")
    parser.add_argument(
        "--facets",
        default=",".join(DEFAULT_FACET_KEYS),
        help="comma-separated facet columns (default: all scenario-cell columns)",
    )
    args = parser.parse_args(argv)

    spec = PlotSpec(
        summary_path=Path(args.summary),
        metric=args.metric,
        facet_keys=tuple(k for k in args.facets.split(",") if k),
        out_dir=Path(args.out),
        image_format=args.format,
    )
    try:
        result = render(spec)
    except MissingColumnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in result.written:
        print(path)
    for slug in result.skipped:
        print(f"skipped facet with no {spec.metric} data: {slug}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
