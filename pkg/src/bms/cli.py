"""Command-line entry point.

    bms run --builtin ucb-grid --out results/ucb.csv
    bms run --config configs/my_experiment.yaml --seed 7 --threads 2 --json

Exit codes: 0 success, 2 invalid configuration or arguments, 3 write failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import ConfigurationError
from .harness import BUILTIN_NAMES, builtin_experiment, load_config, run_experiment, with_overrides

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_WRITE = 3


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bms", description="Bayesian online model selection experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment and write a result table")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="path to a YAML experiment config")
    src.add_argument("--builtin", metavar="NAME", help=f"builtin experiment, one of: {', '.join(BUILTIN_NAMES)}")
    run_p.add_argument("--seed", type=int, default=None, help="base seed (overrides config)")
    run_p.add_argument("--threads", type=int, default=None, help="worker processes (default: CPU count)")
    run_p.add_argument("--out", type=Path, default=None, help="output CSV path (default: <experiment>.csv)")
    run_p.add_argument("--share-data", type=_parse_bool, default=None, metavar="BOOL",
                       help="route every observation to all base learners")
    run_p.add_argument("--json", action="store_true", help="also write a JSON mirror next to the CSV")
    run_p.add_argument("--horizon", type=int, default=None, help="override the configured horizon")
    run_p.add_argument("--replications", type=int, default=None, help="override the configured replication count")
    run_p.add_argument("--no-baselines", action="store_true", help="skip standalone base-learner runs")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        if args.builtin is not None:
            config = builtin_experiment(args.builtin)
        else:
            config = load_config(args.config)
        config = with_overrides(
            config,
            seed=args.seed,
            data_sharing=args.share_data,
            horizon=args.horizon,
            replications=args.replications,
            include_baselines=False if args.no_baselines else None,
        )
    except (ConfigurationError, OSError) as exc:
        print(f"bms: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    table = run_experiment(config, threads=args.threads)

    out = args.out if args.out is not None else Path(f"{config.experiment}.csv")
    try:
        table.write_csv(out)
        if args.json:
            table.write_json(out.with_suffix(".json"))
    except OSError as exc:
        print(f"bms: cannot write results: {exc}", file=sys.stderr)
        return EXIT_WRITE
    print(f"wrote {out} ({len(table.labels)} series, T={config.horizon}, R={config.replications})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    raise AssertionError("unreachable")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
