"""``figures render`` command-line entry point."""
from __future__ import annotations

import argparse
import sys

from .render import SchemaError, render_report_dir


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="figures", description="render report CSVs")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render the standard figure set")
    r.add_argument("--in", dest="in_dir", required=True, help="report directory")
    r.add_argument("--out", dest="out_dir", required=True, help="figure directory")
    r.add_argument("--format", choices=("png", "svg"), default="png")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        results = render_report_dir(args.in_dir, args.out_dir, args.format)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for res in results:
        note = " (no data)" if res.empty else ""
        print(f"wrote {res.path}{note}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
