"""Command-line front end.

    horizonwave run <config.toml> [--out DIR]
    horizonwave gallery list
    horizonwave gallery run <name> [--out DIR]

Exit codes: 0 success, 2 validation error, 3 numeric failure,
4 expected-obstruction scenario that failed to detect the obstruction.
``HORIZONWAVE_THREADS`` caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ValidationError
from .scenarios import EXIT_VALIDATION, list_gallery, run, run_gallery_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizonwave",
        description="Characteristic Cauchy problems on compact Cauchy horizons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config (TOML, schema = 1)")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None, help="override the output directory")

    p_gal = sub.add_parser("gallery", help="the counterexample gallery")
    gal_sub = p_gal.add_subparsers(dest="gallery_command", required=True)
    gal_sub.add_parser("list", help="list gallery scenarios")
    p_gal_run = gal_sub.add_parser("run", help="run one gallery scenario")
    p_gal_run.add_argument("name")
    p_gal_run.add_argument("--out", type=Path, default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        if not args.config.exists():
            print(f"config not found: {args.config}", file=sys.stderr)
            return EXIT_VALIDATION
        return run(args.config, args.out)
    if args.command == "gallery":
        if args.gallery_command == "list":
            for name, description in list_gallery():
                print(f"{name}: {description}")
            return 0
        outdir = args.out or Path("out") / args.name
        try:
            return run_gallery_scenario(args.name, Path(outdir))
        except ValidationError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_VALIDATION
    return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
