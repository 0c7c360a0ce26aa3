# simoe/cli.py
"""Command line interface.

    simoe run --config PATH [--seed N] [--set key=value]... [--output DIR]
    simoe sweep --matrix PATH [--jobs N] [--output DIR]
    simoe verify [--filter NAME] [--output DIR]

Exit codes: 0 success, 1 validation error, 2 property failure, 3 I/O error.

It contains the following functions:
    - `cmd_run(args)` - Returns: exit code, writes report and manifest.
    - `cmd_sweep(args)` - Returns: exit code, writes the aggregated csv.
    - `cmd_verify(args)` - Returns: exit code, prints the pass/fail table.
    - `build_parser()` - Returns: the argument parser.
    - `main(argv)` - Returns: exit code.
"""

import argparse
import logging
import sys
import yaml
import simoe.config as cf
import simoe.verify as vf
from simoe.errors import ConfigError
from simoe.simoe import Experiment, ExperimentMatrix

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PROPERTY = 2
EXIT_IO = 3


def cmd_run(args: argparse.Namespace) -> int:
    cfg = cf.load_config(args.config, overrides=args.set, seed=args.seed)
    experiment = Experiment(cfg, name=args.config)
    written = experiment.to_csv(args.output)
    print(experiment)
    print(experiment.report().T.to_string(header=False))
    logger.info(f"Wrote {', '.join(written)}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    matrix = ExperimentMatrix.from_file(args.matrix)
    print(matrix)
    written = matrix.to_csv(args.output, jobs=args.jobs)
    logger.info(f"Wrote {', '.join(written)}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = vf.run_properties(args.filter, args.output)
    if not results:
        raise ConfigError("filter", f"no property matches {args.filter!r}")
    print(vf.results_table(results).to_string(index=False))
    failed = [result.name for result in results if not result.passed]
    if failed:
        print(f"Failed properties: {', '.join(failed)}")
        return EXIT_PROPERTY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simoe", description="End-cloud Mixture-of-Experts inference simulator."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="simulate one configuration")
    run.add_argument("--config", required=True, help="YAML config or run manifest")
    run.add_argument("--seed", type=int, default=None, help="override the seed")
    run.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="dotted-path override, repeatable",
    )
    run.add_argument("--output", default="results", help="output directory")
    run.set_defaults(handler=cmd_run)

    sweep = commands.add_parser("sweep", help="run an experiment matrix")
    sweep.add_argument("--matrix", required=True, help="YAML experiment matrix")
    sweep.add_argument("--jobs", type=int, default=1, help="parallel runs")
    sweep.add_argument("--output", default="results", help="output directory")
    sweep.set_defaults(handler=cmd_sweep)

    verify = commands.add_parser("verify", help="run the property suite")
    verify.add_argument("--filter", default=None, help="substring of property names")
    verify.add_argument(
        "--output", default="results/verify", help="directory for report artifacts"
    )
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
    )
    try:
        return args.handler(args)
    except ConfigError as error:
        logger.error(f"Invalid configuration, {error}")
        return EXIT_VALIDATION
    except yaml.YAMLError as error:
        logger.error(f"Cannot parse YAML: {error}")
        return EXIT_VALIDATION
    except OSError as error:
        logger.error(f"I/O error: {error}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
