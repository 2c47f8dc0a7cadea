"""
Main
----
Command line entry point. Every experiment is a subcommand; its parameters come from an optional
configuration file, dotlist overrides and flags, in increasing order of priority.
Artifacts and a ``manifest.json`` are written to the output directory; ``verify`` re-checks them.

Examples
********

.. code:: bash

        # Grow a 100-particle HL(0) cluster and keep only CSV artifacts.
        loewner-forge grow-hl --seed 1 --set grow-hl.n=100 --emit csv --out runs/hl

        # Evolve a circle under the string equation, then re-check the trajectory.
        loewner-forge hele-shaw --config experiments.yaml --out runs/circle
        loewner-forge verify runs/circle/manifest.json

"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from colorama import Fore, Style, init

from loewner_forge.cli.config import COMMANDS, load_config
from loewner_forge.cli.commands import run
from loewner_forge.cli.verify import verify
from loewner_forge.core.errors import (
    ArtifactError,
    ConfigError,
    LoewnerForgeError,
    ParameterError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loewner-forge",
        usage="""Runs one Laplacian growth experiment and records its artifacts.

        loewner-forge grow-hl --seed 1 --set grow-hl.n=100 --out runs/hl
        loewner-forge verify runs/hl/manifest.json

        Use the `--help` flag to get more information.""",
    )
    parser.add_argument("command", choices=[*COMMANDS, "verify"], help="Experiment to run, or `verify`.")
    parser.add_argument("manifest", nargs="?", help="Manifest to check; only used by `verify`.")
    parser.add_argument("-c", "--config", help="OmegaConf/YAML file with one section per command.")
    parser.add_argument("-s", "--seed", type=int, help="Root seed of the run.")
    parser.add_argument("--stream", type=int, help="RNG stream of the run.")
    parser.add_argument("-w", "--workers", type=int, help="Worker processes for ensembles.")
    parser.add_argument("-o", "--out", help="Output directory; defaults to runs/<command>.")
    parser.add_argument("-e", "--emit", help="Comma separated artifact formats out of csv, json, svg.")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Dotlist override such as grow-hl.alpha=2; may be repeated.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")
    return parser


def _error(message: str, notes: Sequence[str] = ()) -> None:
    print(f"{Fore.RED}{message}{Style.RESET_ALL}", file=sys.stderr)
    for note in notes:
        print(f"  {note}", file=sys.stderr)


def _verify(path: Optional[str]) -> int:
    if path is None:
        _error("verify needs the path of a manifest.")
        return EXIT_CONFIG
    report = verify(path)
    for line in report.lines():
        print(line)
    if report.passed:
        print(f"{Fore.GREEN}All checks of {report.kind} passed.{Style.RESET_ALL}")
        return EXIT_OK
    _error(f"{len(report.failures)} of {len(report.checks)} checks failed.")
    return EXIT_VERIFY


def main(parsed_args: Optional[argparse.Namespace] = None) -> int:
    """
    Run the command named on the command line.

    :param parsed_args: Set of command line arguments. If passed, overrides the command line contents.
        See the module docs for reference.
    :return: Exit status: 0 on success, 1 for configuration, parameter or artifact errors,
        2 for numeric failures and 3 when a verification check fails.
    """
    if parsed_args is None:
        parsed_args = build_parser().parse_args(sys.argv[1:])
    init()
    logging.basicConfig(level=logging.DEBUG if parsed_args.verbose else logging.INFO, format=LOG_FORMAT)

    try:
        if parsed_args.command == "verify":
            return _verify(parsed_args.manifest)
        config = load_config(
            parsed_args.command,
            parsed_args.config,
            parsed_args.overrides,
            seed=parsed_args.seed,
            stream=parsed_args.stream,
            workers=parsed_args.workers,
            out=parsed_args.out,
            emit=parsed_args.emit,
        )
        manifest = run(config)
    except ConfigError as exc:
        where = f" at {exc.key}" if exc.key else ""
        _error(f"Configuration error{where}: {exc}", getattr(exc, "__notes__", []))
        return EXIT_CONFIG
    except (ParameterError, ArtifactError) as exc:
        _error(f"{type(exc).__name__}: {exc}", getattr(exc, "__notes__", []))
        return EXIT_CONFIG
    except LoewnerForgeError as exc:
        logger.debug("Run failed", exc_info=exc)
        _error(f"{type(exc).__name__}: {exc}", getattr(exc, "__notes__", []))
        return EXIT_NUMERIC

    print(f"{Fore.GREEN}{manifest.kind} finished in {manifest.wall_time:.2f}s{Style.RESET_ALL}")
    for name in manifest.artifacts:
        print(f"  {name}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
