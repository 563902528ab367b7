#!/usr/bin/env python3
"""
Main entry point for the capacity toolkit

Trains capacity-driven autoencoders, evaluates them (BLER and mutual
information sweeps), benchmarks the estimators on correlated Gaussians,
checks gradients and writes value landscapes.

Usage:
    python -m src.main train-ae --config config/ae63.json --out runs/ae63.params
    python -m src.main eval --model runs/ae63.params --config config/ae63.json --mode mi --out runs/ae63_mi.csv
    python -m src.main bench-estimators --config config/bench.json --out runs/bench.csv
    python -m src.main gradcheck
    python -m src.main landscape --gamma 0.5 1 2 --ratio 1 --out runs/landscape.csv
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

# Add the project root to Python path
BASE_DIR = Path(__file__).resolve().parent.parent
sys.path.append(str(BASE_DIR))

from src.cli import EVAL_MODES, cmd_bench_estimators, cmd_eval, cmd_gradcheck, cmd_landscape, cmd_train_ae
from src.errors import DivergenceError, NonFiniteError, ShapeError, ValidationError

logger = logging.getLogger("src.main")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


class UsageParser(argparse.ArgumentParser):
    """Argument parser whose usage errors share the validation exit code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(prog="capacity", description="Capacity-driven autoencoders and MI estimators")
    parser.add_argument("--quiet", action="store_true", help="hide progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train-ae", help="train an autoencoder and save its parameters")
    train.add_argument("--config", required=True, type=Path)
    train.add_argument("--out", required=True, type=Path)
    train.add_argument("--seed", type=int)

    evaluate = sub.add_parser("eval", help="BLER or MI sweep of a saved autoencoder")
    evaluate.add_argument("--model", required=True, type=Path)
    evaluate.add_argument("--config", required=True, type=Path)
    evaluate.add_argument("--mode", required=True, choices=EVAL_MODES)
    evaluate.add_argument("--out", required=True, type=Path)
    evaluate.add_argument("--seed", type=int)

    bench = sub.add_parser("bench-estimators", help="run every estimator on the correlated-Gaussian suite")
    bench.add_argument("--config", required=True, type=Path)
    bench.add_argument("--out", required=True, type=Path)
    bench.add_argument("--seed", type=int)

    gradcheck = sub.add_parser("gradcheck", help="finite-difference check of every op and value function")
    gradcheck.add_argument("--out", type=Path)
    gradcheck.add_argument("--seed", type=int, default=0)

    landscape = sub.add_parser("landscape", help="value curves of the gamma-DIME functional")
    landscape.add_argument("--gamma", required=True, type=float, nargs="+")
    landscape.add_argument("--ratio", type=float, default=1.0)
    landscape.add_argument("--d-max", type=float, default=3.0)
    landscape.add_argument("--step", type=float, default=1e-3)
    landscape.add_argument("--out", required=True, type=Path)
    return parser


def run(args: argparse.Namespace) -> int:
    quiet = args.quiet
    if args.command == "train-ae":
        cmd_train_ae(args.config, args.out, args.seed, quiet)
    elif args.command == "eval":
        cmd_eval(args.model, args.config, args.mode, args.out, args.seed, quiet)
    elif args.command == "bench-estimators":
        cmd_bench_estimators(args.config, args.out, args.seed, quiet)
    elif args.command == "gradcheck":
        _, passed = cmd_gradcheck(args.out, args.seed)
        if not passed:
            return EXIT_NUMERICAL
    elif args.command == "landscape":
        cmd_landscape(args.gamma, args.ratio, args.out, args.d_max, args.step)
    return EXIT_OK


def main(argv=None) -> int:
    """
    Parse arguments, run one subcommand and map failures to exit codes
    """
    load_dotenv()
    logging.basicConfig(
        level=logging.getLevelName(os.getenv("LOG_LEVEL", "INFO")),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stdout)],
    )
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code

    try:
        return run(args)
    except (ValidationError, ShapeError, FileNotFoundError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INVALID
    except (DivergenceError, NonFiniteError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
