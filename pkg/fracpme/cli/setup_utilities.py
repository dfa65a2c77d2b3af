"""
A file that stores general functionality for setting up a fracpme run: the
output directory and its log files, and the run configuration assembled from
defaults, an optional INI file and command line flags. This file supports the
command line interface entrypoint in fracpme_cli.py.
"""
import os

import argparse
import ast
import configparser
import logging
import numbers
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from fracpme.data import ProblemParams
from fracpme.mixins import (
    ConfigError,
    ParameterError,
    UnspecifiedConfigParameterError,
    logger,
)
from fracpme.cli import constants
from fracpme.solver import SolverConfig

# command line flag -> (section, key)
FLAG_TO_PARAMETER = {
    "alpha": ("general", "alpha"),
    "m": ("general", "m"),
    "grid_step": ("general", "grid_step"),
    "picard_tol": ("general", "picard_tol"),
    "shoot_tol": ("general", "shoot_tol"),
    "out": ("general", "output_directory"),
    "format": ("general", "output_format"),
    "jobs": ("general", "jobs"),
    "verbose": ("general", "verbose"),
    "oracle": ("validate", "oracle"),
}

FIELD_TYPES = {
    "alpha": float,
    "m": float,
    "grid_step": float,
    "grid_cells": int,
    "picard_tol": float,
    "max_picard_iters": int,
    "damping": float,
    "n_nodes": int,
    "max_nodes": int,
    "shoot_tol": float,
    "method": str,
    "extend_below_beta0": bool,
    "scan_points": int,
    "output_directory": str,
    "output_format": str,
    "jobs": int,
    "verbose": bool,
    "plot_envelopes": bool,
    "record_wall_time": bool,
}

SECTION_TYPES = [
    ("bounds", "beta_min", float),
    ("bounds", "beta_max", float),
    ("bounds", "beta_points", int),
    ("sweep", "alphas", list),
    ("sweep", "ms", list),
    ("validate", "oracle", bool),
    ("validate", "refinements", int),
    ("validate", "nx", int),
    ("validate", "nt", int),
    ("validate", "final_time", float),
    ("validate", "field_every", int),
    ("validate", "front_threshold", float),
    ("validate", "envelope_slack", float),
    ("validate", "flux_slack", float),
    ("validate", "moment_tolerance", float),
    ("validate", "richardson_min_ratio", float),
    ("validate", "self_convergence_tolerance", float),
    ("validate", "max_oracle_distance", float),
    ("validate", "front_exponent_tolerance", float),
]

OPTIONAL_FIELDS = {"grid_step", ("bounds", "beta_min"), ("bounds", "beta_max")}

TYPE_NAMES = {
    float: "a number",
    int: "an integer",
    bool: "True or False",
    str: "a quoted string",
    list: "a list of numbers",
}


def _has_type(value: Any, kind: type) -> bool:
    if kind is list:
        return isinstance(value, (list, tuple)) and all(
            _has_type(v, float) for v in value
        )
    if isinstance(value, bool):
        return kind is bool
    if kind is float:
        return isinstance(value, numbers.Real)
    if kind is int:
        return isinstance(value, numbers.Integral)
    return isinstance(value, kind)


def setup(output_directory_location: str, verbose: bool) -> None:
    """Setup environment for a run.

    Args:
        output_directory_location: Where to look for, or start a new, output
            directory
        verbose: Whether or not to log debugging output.
    """

    os.makedirs(output_directory_location, exist_ok=True)

    # In addition to logging to the console, output logs to files.
    output_handler = logging.FileHandler(
        os.path.join(output_directory_location, constants.LOG_FILE)
    )
    output_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.addHandler(output_handler)

    error_handler = logging.FileHandler(
        os.path.join(output_directory_location, constants.ERROR_FILE)
    )
    error_handler.setLevel(logging.ERROR)
    logger.addHandler(error_handler)


def parse_config(config_string: str) -> Dict[str, Dict[str, Any]]:
    """Parse a run configuration.

    Args:
        config_string: Configuration file rendered as a string.

    Returns:
        A dictionary mapping every section to its parameters, defaults
        filled in.

    Raises:
        UnspecifiedConfigParameterError if a section or key is unknown or a
            key is left without a value.
        ConfigError listing every value that is not a Python literal.
    """
    user = configparser.ConfigParser()
    try:
        user.read_string(config_string)
    except configparser.Error as error:
        raise ConfigError([f"unreadable configuration: {error}"])

    key_violations = []
    for section in user.sections():
        if section not in constants.DEFAULT_RUN_PARAMETERS:
            key_violations.append(
                f"unknown section [{section}]; allowed sections are "
                f"{', '.join(constants.DEFAULT_RUN_PARAMETERS)}"
            )
            continue
        for key, value in user[section].items():
            if key not in constants.DEFAULT_RUN_PARAMETERS[section]:
                key_violations.append(f"unknown key `{key}` in [{section}]")
            elif not value.strip():
                key_violations.append(f"no value given for `{key}` in [{section}]")

    config = configparser.ConfigParser()

    # load in defaults
    config.read_dict(constants.DEFAULT_RUN_PARAMETERS)

    config.read_string(config_string)

    violations = []
    parameters = {}
    for section in constants.DEFAULT_RUN_PARAMETERS:
        parameters[section] = {}
        for key, value in config[section].items():
            if not value.strip():
                continue
            try:
                parameters[section][key] = ast.literal_eval(value)
            except (ValueError, SyntaxError):
                violations.append(
                    f"value of `{key}` in [{section}] is not a literal: {value}"
                )

    if key_violations:
        raise UnspecifiedConfigParameterError(key_violations + violations)
    if violations:
        raise ConfigError(violations)
    return parameters


@dataclass
class RunConfig:
    """Everything a subcommand needs, after merging all configuration layers.

    Args:
        alpha: Order of the time derivative.
        m: Nonlinearity exponent.
        grid_step: Fixed grid spacing, or None for eta1 / grid_cells.
        grid_cells: Cells between 0 and eta1 when grid_step is None.
        picard_tol: Picard tolerance.
        max_picard_iters: Picard sweep limit.
        damping: Picard relaxation factor.
        n_nodes: Initial Gauss-Jacobi node count.
        max_nodes: Gauss-Jacobi node cap.
        shoot_tol: Tolerance on the shooting residual.
        method: "bisection" or "secant".
        extend_below_beta0: Whether the search may go below beta0.
        scan_points: Slopes of the optional pre-scan.
        output_directory: Where outputs are written.
        output_format: "csv" or "json" for tabular outputs.
        jobs: Worker processes for sweeps and scans.
        verbose: Whether to log debugging output.
        plot_envelopes: Whether solve writes plotdata.csv.
        record_wall_time: Whether result.json records the wall time.
        bounds: Options of the bounds subcommand.
        sweep: Options of the sweep subcommand.
        validate: Options of the validate subcommand.
    """

    alpha: float = 0.5
    m: float = 2.0
    grid_step: Optional[float] = None
    grid_cells: int = 1024
    picard_tol: float = 1e-10
    max_picard_iters: int = 500
    damping: float = 1.0
    n_nodes: int = 32
    max_nodes: int = 512
    shoot_tol: float = 1e-8
    method: str = "bisection"
    extend_below_beta0: bool = True
    scan_points: int = 0
    output_directory: str = "fracpme_output"
    output_format: str = "csv"
    jobs: int = 1
    verbose: bool = False
    plot_envelopes: bool = False
    record_wall_time: bool = False
    bounds: Dict[str, Any] = field(default_factory=dict)
    sweep: Dict[str, Any] = field(default_factory=dict)
    validate: Dict[str, Any] = field(default_factory=dict)

    def type_violations(self) -> List[str]:
        """Lists every field whose value has the wrong type."""
        violations = []
        for name, kind in FIELD_TYPES.items():
            value = getattr(self, name)
            if value is None and name in OPTIONAL_FIELDS:
                continue
            if not _has_type(value, kind):
                violations.append(
                    f"{name} must be {TYPE_NAMES[kind]}, got {value!r}"
                )
        for section, key, kind in SECTION_TYPES:
            options = getattr(self, section)
            if key not in options:
                continue
            value = options[key]
            if value is None and (section, key) in OPTIONAL_FIELDS:
                continue
            if not _has_type(value, kind):
                violations.append(
                    f"{key} in [{section}] must be {TYPE_NAMES[kind]}, "
                    f"got {value!r}"
                )
        return violations

    def validate_fields(self) -> List[str]:
        """Lists every violated constraint of this configuration."""
        violations = self.type_violations()
        if violations:
            return violations
        violations = list(ProblemParams.violations(self.alpha, self.m))
        try:
            self.solver_config()
        except (ParameterError, TypeError) as error:
            violations.extend(str(error).split("; "))
        if not self.shoot_tol > 0:
            violations.append(f"shoot_tol must be positive, got {self.shoot_tol}")
        if self.method not in ("bisection", "secant"):
            violations.append(
                f"method must be bisection or secant, got {self.method}"
            )
        if self.output_format not in constants.OUTPUT_FORMATS:
            violations.append(
                f"output_format must be one of "
                f"{', '.join(constants.OUTPUT_FORMATS)}, got {self.output_format}"
            )
        if not isinstance(self.jobs, int) or self.jobs < 1:
            violations.append(f"jobs must be a positive integer, got {self.jobs}")
        if self.scan_points < 0:
            violations.append(
                f"scan_points must be nonnegative, got {self.scan_points}"
            )

        beta_min = self.bounds.get("beta_min")
        beta_max = self.bounds.get("beta_max")
        if beta_min is not None and not beta_min > 0:
            violations.append(f"beta_min must be positive, got {beta_min}")
        if (
            beta_min is not None
            and beta_max is not None
            and not beta_max > beta_min
        ):
            violations.append("beta_max must exceed beta_min")
        if self.bounds.get("beta_points", 2) < 2:
            violations.append("beta_points must be at least 2")

        alphas = self.sweep.get("alphas", [])
        ms = self.sweep.get("ms", [])
        if not alphas or not ms:
            violations.append("sweep needs at least one alpha and one m")
        for alpha in alphas:
            violations.extend(
                f"sweep: {v}" for v in ProblemParams.violations(alpha, 2.0)
            )
        for m in ms:
            violations.extend(
                f"sweep: {v}" for v in ProblemParams.violations(0.5, m)
            )

        if self.validate.get("refinements", 3) < 3:
            violations.append("validate needs at least 3 refinements")
        for key in ("nx", "nt"):
            if self.validate.get(key, 2) < 2:
                violations.append(f"validate {key} must be at least 2")
        if not self.validate.get("final_time", 1.0) > 0:
            violations.append("validate final_time must be positive")
        return violations

    def problem_params(self) -> ProblemParams:
        return ProblemParams(self.alpha, self.m)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            grid_step=self.grid_step,
            grid_cells=self.grid_cells,
            picard_tol=self.picard_tol,
            max_picard_iters=self.max_picard_iters,
            damping=self.damping,
            n_nodes=self.n_nodes,
            max_nodes=self.max_nodes,
        )

    def shooting_options(self) -> Dict[str, Any]:
        return {
            "shoot_tol": self.shoot_tol,
            "method": self.method,
            "extend_below_beta0": self.extend_below_beta0,
            "scan_points": self.scan_points,
            "jobs": self.jobs,
        }


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merges defaults, the config file and command line flags.

    Command line flags override config file values, which override the
    defaults.

    Args:
        args: Parsed command line arguments. `args.config` may name an INI
            file; every flag left at None is not applied.

    Returns:
        A validated RunConfig.

    Raises:
        ConfigError listing every violated constraint.
    """
    config_string = ""
    config_filepath = getattr(args, "config", None)
    if config_filepath is not None:
        if not os.path.isfile(config_filepath):
            raise ConfigError([f"config file {config_filepath} does not exist"])
        with open(config_filepath, "r") as f:
            config_string = f.read()

    parameters = parse_config(config_string)
    for flag, (section, key) in FLAG_TO_PARAMETER.items():
        value = getattr(args, flag, None)
        if value is not None:
            parameters[section][key] = value

    run_config = RunConfig(
        **parameters["general"],
        bounds=parameters["bounds"],
        sweep=parameters["sweep"],
        validate=parameters["validate"],
    )
    violations = run_config.validate_fields()
    if violations:
        raise ConfigError(violations)
    return run_config
