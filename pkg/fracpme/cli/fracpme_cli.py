"""
Main logic behind the fracpme command line interface.

This file stores the main entry point for fracpme, and makes heavy use of the
high level functionality in fracpme.cli.pipeline. Four subcommands are
available:

    fracpme solve     no-flux profile for one (alpha, m)
    fracpme bounds    closed-form bounds over a range of slopes
    fracpme sweep     solve over an (alpha, m) grid
    fracpme validate  residual, self-convergence and oracle checks

Every subcommand takes the same flags, and an optional INI file through
--config. Flags override the file, which overrides the defaults. The
FRACPME_LOG environment variable (error, info or debug) sets the verbosity.
"""
import argparse
import logging
from typing import List, Optional

from fracpme.cli import constants, pipeline, setup_utilities
from fracpme.mixins import ConfigError, log_runtime, logger, set_level_from_env

COMMANDS = {
    "solve": pipeline.cmd_solve,
    "bounds": pipeline.cmd_bounds,
    "sweep": pipeline.cmd_sweep,
    "validate": pipeline.cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="INI configuration file.")
    common.add_argument("--alpha", type=float, help="Order of the derivative.")
    common.add_argument("--m", type=float, help="Nonlinearity exponent.")
    common.add_argument(
        "--grid-step", dest="grid_step", type=float, help="Fixed eta spacing."
    )
    common.add_argument(
        "--picard-tol", dest="picard_tol", type=float, help="Picard tolerance."
    )
    common.add_argument(
        "--shoot-tol", dest="shoot_tol", type=float, help="Shooting tolerance."
    )
    common.add_argument("--out", type=str, help="Output directory.")
    common.add_argument(
        "--format",
        choices=constants.OUTPUT_FORMATS,
        help="Format of tabular outputs.",
    )
    common.add_argument("--jobs", type=int, help="Worker processes.")
    common.add_argument(
        "--oracle",
        action="store_const",
        const=True,
        help="Cross-check against a direct simulation (validate only).",
    )
    common.add_argument(
        "--verbose",
        action="store_const",
        const=True,
        help="Write debugging output to the log file.",
    )

    parser = argparse.ArgumentParser(
        prog="fracpme",
        description="Self-similar solutions of the time-fractional porous "
        "medium equation.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, function in COMMANDS.items():
        subparsers.add_parser(
            command, parents=[common], help=function.__doc__.splitlines()[0]
        )
    return parser


@logger.namespaced("main")
@log_runtime
def main(argv: Optional[List[str]] = None) -> int:

    # --------------- Create Argument Parser & Read in Arguments -------------- #
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        set_level_from_env()
        run_config = setup_utilities.build_run_config(args)
    except (ConfigError, ValueError) as error:
        logger.error(str(error))
        return constants.EXIT_CODES["config_error"]

    if run_config.verbose:
        logger.setLevel(logging.DEBUG)

    # set up output directory
    setup_utilities.setup(run_config.output_directory, verbose=run_config.verbose)

    # ---------------------- Run Command ---------------------- #
    return COMMANDS[args.command](run_config)


if __name__ == "__main__":
    raise SystemExit(main())
