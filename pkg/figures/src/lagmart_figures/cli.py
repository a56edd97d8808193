"""figures: render the study's diagnostic plots from a replication CSV."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import build_all, render
from .records import SchemaError, read_table


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render diagnostic figures from a replication CSV",
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="replications.csv path")
    parser.add_argument("--out", dest="out_dir", required=True, help="output directory")
    args = parser.parse_args(argv)

    try:
        table = read_table(args.input_csv)
    except SchemaError as exc:
        print(f"error: schema mismatch: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 2

    try:
        figures = build_all(table)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for data in figures:
        path = out_dir / f"{data.figure_id}.png"
        render(data, path)
        print(f"wrote {path}")
        for warning in data.warnings:
            print(f"warning: {data.figure_id}: {warning}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
