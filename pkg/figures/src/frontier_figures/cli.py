"""Command line front end: summary CSVs in, one image out."""

import argparse
import sys

from .panels import FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frontier-figures", allow_abbrev=False,
        description="Draw log-log RMSE-versus-n panels from Monte Carlo "
                    "summary CSVs, one curve per estimator.")
    parser.add_argument("csv", nargs="+", help="input CSV file(s)")
    parser.add_argument("--out", required=True,
                        help="output image path (.png or .svg)")
    parser.add_argument("--panel-key", default="experiment_id",
                        help="column whose values split rows into panels "
                             "(default: experiment_id)")
    parser.add_argument("--linear-x", action="store_true",
                        help="use a linear x axis instead of log")
    parser.add_argument("--linear-y", action="store_true",
                        help="use a linear y axis instead of log")
    return parser


def main(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        report = render(FigureSpec(
            csv_paths=tuple(args.csv), out_path=args.out,
            panel_key=args.panel_key,
            logx=not args.linear_x, logy=not args.linear_y))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {report.out_path}: {report.panel_count} panel(s), "
          f"{sum(report.curves_per_panel)} curve(s)")
    return 0


def entry():
    raise SystemExit(main(sys.argv[1:]))
