"""Top level for the command line interface."""

from . import constants
from .setup_utilities import RunConfig, build_run_config, parse_config, setup
from .pipeline import cmd_bounds, cmd_solve, cmd_sweep, cmd_validate
