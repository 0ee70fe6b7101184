"""Command-line driver: runs one experiment, writes report.json and
summary.csv, and encodes pass/fail in the exit code (0 all-pass, 1 any
failure, 2 usage error)."""

from __future__ import annotations

import argparse
import sys

from .experiments import EXPERIMENTS, ExperimentConfig

# per-experiment default budgets; all finish in a few minutes
_DEFAULTS = {
    "rice": {"n_samples": 20000, "n_steps": 2048},
    "kac": {"n_samples": 10000, "n_steps": 4096},
    "bridge": {"n_samples": 20000, "n_steps": 1024},
    "chaos": {"n_samples": 4000, "n_steps": 256},
    "fac": {"n_samples": 10000, "n_steps": 512},
    "sweep": {"n_samples": 10000, "n_steps": 4096},
    "selftest": {"n_samples": 100, "n_steps": 256},
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wcl",
        description="Stochastic local-time and chaos-expansion experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--samples", type=int, help="Monte Carlo sample count")
        p.add_argument("--steps", type=int, help="time grid steps")
        p.add_argument("--eps-grid", help="comma-separated decreasing eps values")
        p.add_argument("--quiet", action="store_true", help="suppress row printout")
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    name = args.experiment
    if args.config:
        config = ExperimentConfig.from_json(args.config)
        config.experiment = name
    else:
        config = ExperimentConfig(experiment=name, **_DEFAULTS[name])
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out_dir = args.out
    if args.samples is not None:
        config.n_samples = args.samples
    if args.steps is not None:
        config.n_steps = args.steps
    if args.eps_grid is not None:
        config.eps_grid = [float(v) for v in args.eps_grid.split(",")]

    report = EXPERIMENTS[name](config)
    report.write()
    report.print_summary(quiet=args.quiet)
    return 0 if report.all_passed else 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
