"""Command line entry point.

``rmtlab <experiment> [--config FILE] [flag overrides]`` runs one
experiment and writes ``<out>/<experiment>/replicas.csv`` plus
``summary.json``.  Exit codes: 0 pass, 1 gate failure, 2 configuration
error, 3 numerical failure budget exceeded.
"""

import argparse
import sys

from .config import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    load_config,
)
from .harness import (
    VERSION_STRING,
    FailureBudgetError,
    run_experiment,
    write_record,
)
from .numlin import NumericalFailure

__all__ = ["main"]

EXIT_PASS = 0
EXIT_GATE_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Spectra of products of independent random matrices: "
                    "config-driven Monte Carlo and exact-formula experiments.",
    )
    parser.add_argument("--version", action="version", version=VERSION_STRING)
    sub = parser.add_subparsers(dest="experiment", metavar="experiment")
    for name in EXPERIMENTS:
        alias = "run_" + name.replace("-", "_")
        p = sub.add_parser(
            name, aliases=[alias],
            help=f"run the {name} experiment",
        )
        p.set_defaults(experiment=name)
        p.add_argument("--config", metavar="PATH",
                       help="flat key = value config file")
        p.add_argument("--n", type=int, help="factor dimension")
        p.add_argument("--m", type=int, help="number of factors")
        p.add_argument("--tau", type=float,
                       help="truncation ratio (selects truncated factors)")
        p.add_argument("--replicas", type=int, help="Monte Carlo replicas")
        p.add_argument("--seed", type=int, dest="master_seed",
                       help="master seed")
        p.add_argument("--workers", type=int, help="worker thread count")
        p.add_argument("--out", help="output directory")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.experiment is None:
        parser.print_help()
        return EXIT_CONFIG_ERROR
    try:
        if args.config is not None:
            cfg = load_config(args.config)
        else:
            cfg = ExperimentConfig()
        cfg = apply_overrides(
            cfg,
            experiment=args.experiment,
            n=args.n,
            m=args.m,
            tau=args.tau,
            replicas=args.replicas,
            master_seed=args.master_seed,
            workers=args.workers,
            out=args.out,
        )
    except ConfigError as exc:
        print(f"rmtlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        record = run_experiment(cfg)
    except ConfigError as exc:
        print(f"rmtlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (FailureBudgetError, NumericalFailure) as exc:
        print(f"rmtlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE

    csv_path, json_path = write_record(record)
    verdict = "PASS" if record.passed else "FAIL"
    print(f"{cfg.experiment}: {verdict} "
          f"({record.runtime_seconds:.2f}s, {len(record.rows)} rows, "
          f"{len(record.failures)} failed replicas)")
    print(f"  rows    {csv_path}")
    print(f"  summary {json_path}")
    return EXIT_PASS if record.passed else EXIT_GATE_FAILURE


if __name__ == "__main__":
    sys.exit(main())
