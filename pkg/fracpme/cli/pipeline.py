"""
This file contains all high-level functionality behind the fracpme
subcommands: solving for the no-flux profile, tabulating the closed-form
bounds, sweeping over (alpha, m) and validating a solution. This file is mainly
invoked by fracpme_cli.py.
"""
import dataclasses
import itertools
import json
import multiprocessing
import os
import time
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm.auto import tqdm
from typing_extensions import Literal

from fracpme.cli import constants
from fracpme.cli.setup_utilities import RunConfig
from fracpme.data import ProblemParams, ShootingResult
from fracpme.mixins import FracPMEError, log_kwargs, log_runtime, logger
from fracpme.simulator import (
    FractionalPorousMediumSimulator,
    compare_self_similar,
    front_exponent,
    front_positions,
)
from fracpme.solver import (
    ShootingSolver,
    apply_S,
    flux,
    moment_identity_residual,
    residual_eq2,
)
from fracpme.tools import bounds, ek_apply_grid

EXIT_CODES = constants.EXIT_CODES


def write_json(payload: Dict[str, Any], path: str) -> None:
    """Writes a JSON document with sorted keys and a schema version."""
    payload = dict(payload, schema_version=constants.SCHEMA_VERSION)
    with open(path, "w", newline="\n") as f:
        json.dump(payload, f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def write_table(
    table: pd.DataFrame,
    directory: str,
    stem: str,
    output_format: Literal["csv", "json"],
) -> str:
    """Writes a table as CSV or JSON.

    CSV files carry a header, use ',' and LF line endings, 17 significant
    digits and empty cells for missing values. JSON files hold the column
    order and one record per row, missing values as null.

    Returns:
        The path written.
    """
    path = os.path.join(directory, f"{stem}.{output_format}")
    if output_format == "csv":
        table.to_csv(path, **constants.CSV_OPTIONS)
    else:
        records = [
            {column: _json_value(value) for column, value in row.items()}
            for row in table.to_dict(orient="records")
        ]
        write_json({"columns": list(table.columns), "rows": records}, path)
    return path


def _bound_or_none(function, beta: float, params: ProblemParams):
    try:
        return float(function(beta, params))
    except FracPMEError:
        return None


def summarize(
    result: ShootingResult, params: ProblemParams
) -> Dict[str, Any]:
    """Flat summary of a ShootingResult, as written to result.json."""
    beta = result.beta_star
    return {
        "alpha": params.alpha,
        "m": params.m,
        "beta_star": beta,
        "eta_star": result.eta_star,
        "flux_residual": result.flux_residual,
        "flux": flux(result.profile, beta, params),
        "beta0": result.beta0,
        "eta1": _bound_or_none(bounds.eta1, beta, params),
        "eta2": _bound_or_none(bounds.eta2, beta, params),
        "f_plus": _bound_or_none(bounds.f_plus, beta, params),
        "f_minus": _bound_or_none(bounds.f_minus, beta, params),
        "grid_step": result.profile.grid_step,
        "picard_iterations": result.total_picard_iterations,
        "shooting_evaluations": len(result.evaluations),
        "converged": result.converged,
        "bracket_collapsed": result.bracket_collapsed,
        "below_beta0": result.below_beta0,
        "degenerate": result.degenerate,
        "roots": [list(root) for root in result.roots],
    }


def profile_table(result: ShootingResult, params: ProblemParams) -> pd.DataFrame:
    """Columns eta, U, Y and IU (the Erdelyi-Kober transform of U)."""
    u = result.profile.as_u()
    return pd.DataFrame(
        {
            "eta": u.grid,
            "U": u.values,
            "Y": u.as_y(params.m).values,
            "IU": ek_apply_grid(u, params.alpha),
        }
    )


def envelope_table(
    result: ShootingResult, params: ProblemParams
) -> pd.DataFrame:
    """Columns eta, g1, g2 and Y on the solution grid."""
    u = result.profile.as_u()
    grid = u.grid
    return pd.DataFrame(
        {
            "eta": grid,
            "g1": bounds.g1(grid, result.beta_star, params),
            "g2": bounds.g2(grid, result.beta_star, params),
            "Y": u.as_y(params.m).values,
        }
    )


def _solution_status(result: ShootingResult) -> str:
    if result.converged:
        return "converged"
    if result.degenerate:
        return "degenerate"
    return "not_converged"


def run_solve(
    config: RunConfig, directory: str
) -> Tuple[int, Dict[str, Any]]:
    """Solves one (alpha, m) pair and writes its artifacts into `directory`.

    Returns:
        The exit code and the summary written to result.json.
    """
    os.makedirs(directory, exist_ok=True)
    params = config.problem_params()
    solver = ShootingSolver(config.solver_config(), **config.shooting_options())

    start = time.perf_counter()
    try:
        result = solver.solve(params)
    except FracPMEError as error:
        wall_time = time.perf_counter() - start
        logger.error(f"Solver failed: {error}")
        summary = {
            "alpha": params.alpha,
            "m": params.m,
            "status": "failed",
            "error": type(error).__name__,
            "message": str(error),
        }
        history = getattr(error, "residual_history", None)
        if history:
            summary["beta"] = _json_value(getattr(error, "beta", None))
            summary["residual_history_tail"] = _json_value(history[-10:])
        if config.record_wall_time:
            summary["wall_time"] = wall_time
        write_json(summary, os.path.join(directory, "result.json"))
        return EXIT_CODES["solver_failure"], summary
    wall_time = time.perf_counter() - start
    logger.info(f"Solved alpha = {params.alpha}, m = {params.m} in {wall_time} s.")

    summary = summarize(result, params)
    summary["status"] = _solution_status(result)
    if config.record_wall_time:
        summary["wall_time"] = wall_time

    write_table(
        profile_table(result, params), directory, "profile", config.output_format
    )
    if config.plot_envelopes:
        write_table(
            envelope_table(result, params),
            directory,
            "plotdata",
            config.output_format,
        )
    write_json(
        {k: _json_value(v) for k, v in summary.items()},
        os.path.join(directory, "result.json"),
    )

    if summary["status"] == "not_converged":
        return EXIT_CODES["solver_failure"], summary
    return EXIT_CODES["success"], summary


@logger.namespaced("solve")
@log_runtime
def cmd_solve(config: RunConfig) -> int:
    """Writes profile, result.json and optionally plotdata for one pair.

    Returns:
        0 on success, 2 if the solver failed or did not converge.
    """
    code, _ = run_solve(config, config.output_directory)
    return code


@logger.namespaced("bounds")
@log_kwargs
def bounds_table(
    params: ProblemParams,
    beta_min: Optional[float] = None,
    beta_max: Optional[float] = None,
    beta_points: int = 41,
) -> pd.DataFrame:
    """Tabulates beta, beta0, eta1, eta2, f_plus and f_minus over a range.

    The range defaults to [beta0 / 2, 3 beta0] and always contains beta0.
    eta1 and f_plus are missing below beta0.
    """
    threshold = bounds.beta0(params)
    lower = 0.5 * threshold if beta_min is None else beta_min
    upper = 3.0 * threshold if beta_max is None else beta_max
    betas = np.linspace(lower, upper, beta_points)
    if lower <= threshold <= upper:
        betas = np.union1d(betas, [threshold])

    rows = [bounds.bounds_report(beta, params).to_dict() for beta in betas]
    table = pd.DataFrame(
        rows, columns=["beta", "beta0", "eta1", "eta2", "f_plus", "f_minus"]
    )
    return table.astype(float)


@logger.namespaced("bounds")
@log_runtime
def cmd_bounds(config: RunConfig) -> int:
    """Writes the bounds table for the configured (alpha, m).

    Returns:
        0.
    """
    os.makedirs(config.output_directory, exist_ok=True)
    table = bounds_table(
        config.problem_params(),
        beta_min=config.bounds.get("beta_min"),
        beta_max=config.bounds.get("beta_max"),
        beta_points=config.bounds.get("beta_points", 41),
    )
    write_table(table, config.output_directory, "bounds", config.output_format)
    return EXIT_CODES["success"]


def _sweep_cell(arguments) -> Dict[str, Any]:
    index, alpha, m, config = arguments
    cell_config = dataclasses.replace(config, alpha=alpha, m=m, jobs=1)
    directory = os.path.join(
        config.output_directory, f"cell_{index:03d}_alpha{alpha:g}_m{m:g}"
    )
    code, summary = run_solve(cell_config, directory)
    return {
        "alpha": alpha,
        "m": m,
        "beta_star": summary.get("beta_star"),
        "eta_star": summary.get("eta_star"),
        "flux_residual": summary.get("flux_residual"),
        "beta0": summary.get("beta0", bounds.beta0(ProblemParams(alpha, m))),
        "eta1": summary.get("eta1"),
        "eta2": summary.get("eta2"),
        "converged": summary.get("converged", False),
        "bracket_collapsed": summary.get("bracket_collapsed", False),
        "below_beta0": summary.get("below_beta0", False),
        "status": summary.get("status"),
        "succeeded": code == EXIT_CODES["success"],
    }


def _log_trends(table: pd.DataFrame) -> None:
    for m, cells in table.groupby("m", sort=True):
        cells = cells.dropna(subset=["eta_star"]).sort_values("alpha")
        if len(cells) < 2:
            continue
        steps = np.diff(cells["eta_star"].to_numpy(dtype=float))
        if np.all(steps > 0):
            trend = "increasing"
        elif np.all(steps < 0):
            trend = "decreasing"
        else:
            trend = "not monotone"
        logger.info(f"m = {m:g}: eta* is {trend} in alpha")


@logger.namespaced("sweep")
@log_runtime
def cmd_sweep(config: RunConfig) -> int:
    """Solves every (alpha, m) cell and writes one summary row per cell.

    Cells run concurrently on `jobs` processes, each writing into its own
    directory.

    Returns:
        0 if at least one cell succeeded, 2 otherwise.
    """
    os.makedirs(config.output_directory, exist_ok=True)
    cells = [
        (index, float(alpha), float(m), config)
        for index, (alpha, m) in enumerate(
            itertools.product(config.sweep["alphas"], config.sweep["ms"])
        )
    ]
    if config.jobs > 1:
        with multiprocessing.Pool(processes=config.jobs) as pool:
            rows = list(tqdm(pool.imap(_sweep_cell, cells), total=len(cells)))
    else:
        rows = [_sweep_cell(cell) for cell in tqdm(cells)]

    table = pd.DataFrame(rows)
    write_table(table, config.output_directory, "sweep", config.output_format)
    _log_trends(table)

    if table["succeeded"].any():
        return EXIT_CODES["success"]
    return EXIT_CODES["solver_failure"]


def _check(
    name: str, passed: bool, value: Any, threshold: Any
) -> Dict[str, Any]:
    status = "pass" if passed else "fail"
    logger.info(f"{name}: {status} (value {value}, threshold {threshold})")
    return {
        "name": name,
        "passed": bool(passed),
        "value": _json_value(value),
        "threshold": _json_value(threshold),
    }


def _richardson_ratio(values: List[float]) -> float:
    coarse, fine = abs(values[1] - values[0]), abs(values[2] - values[1])
    if fine == 0.0:
        return np.inf if coarse > 0.0 else np.nan
    return coarse / fine


def solution_checks(
    result: ShootingResult,
    params: ProblemParams,
    options: Dict[str, Any],
    shoot_tol: float,
) -> List[Dict[str, Any]]:
    """Checks on one converged solution: envelopes, brackets, shape."""
    beta = result.beta_star
    u = result.profile.as_u()
    y = u.as_y(params.m)
    h = u.grid_step
    admissible = beta >= result.beta0
    checks = []

    raw = apply_S(y, beta, params, check_admissible=False)
    slack = options["envelope_slack"]
    upper = np.max(raw - bounds.g1(u.grid, beta, params))
    lower = np.max(bounds.g2(u.grid, beta, params) - raw)
    checks.append(
        _check("envelopes", max(upper, lower) <= slack, max(upper, lower), slack)
    )

    eta2 = bounds.eta2(beta, params)
    in_bracket = result.eta_star >= eta2 - h
    if admissible:
        in_bracket &= result.eta_star <= bounds.eta1(beta, params) + h
    checks.append(
        _check("free_boundary_bracket", in_bracket, result.eta_star, eta2 - h)
    )

    flux_slack = options["flux_slack"]
    f_minus = bounds.f_minus(beta, params)
    flux_ok = f_minus - flux_slack <= 0.0
    if admissible:
        flux_ok &= 0.0 <= bounds.f_plus(beta, params) + flux_slack
    checks.append(_check("flux_bracket", flux_ok, f_minus, flux_slack))

    checks.append(
        _check(
            "no_flux",
            abs(result.flux_residual) <= shoot_tol,
            result.flux_residual,
            shoot_tol,
        )
    )

    violations = u.membership_violations(1e-12)
    monotone = u.is_nonincreasing(1e-12)
    checks.append(
        _check(
            "profile_shape",
            not violations and monotone,
            "; ".join(violations) or ("nonincreasing" if monotone else "increasing"),
            None,
        )
    )

    moment = moment_identity_residual(u, params)
    checks.append(
        _check(
            "moment_identity",
            moment <= options["moment_tolerance"],
            moment,
            options["moment_tolerance"],
        )
    )
    return checks


def oracle_checks(
    result: ShootingResult,
    params: ProblemParams,
    options: Dict[str, Any],
    directory: str,
    output_format: Literal["csv", "json"],
) -> List[Dict[str, Any]]:
    """Cross-checks the profile against a direct simulation of the PDE."""
    simulator = FractionalPorousMediumSimulator(
        params,
        final_time=options["final_time"],
        nx=options["nx"],
        nt=options["nt"],
    )
    field = simulator.simulate()
    threshold = options["front_threshold"]

    write_table(
        field.to_dataframe(every=options["field_every"]),
        directory,
        "oracle_field",
        output_format,
    )
    write_table(
        pd.DataFrame(
            {"t": field.t, "x_f": front_positions(field, threshold)}
        ),
        directory,
        "oracle_front",
        output_format,
    )

    checks = []
    distance = compare_self_similar(field, result.profile)
    checks.append(
        _check(
            "oracle_distance",
            distance <= options["max_oracle_distance"],
            distance,
            options["max_oracle_distance"],
        )
    )
    exponent = front_exponent(field, threshold)
    tolerance = options["front_exponent_tolerance"]
    checks.append(
        _check(
            "oracle_front_exponent",
            abs(exponent - params.alpha / 2.0) <= tolerance,
            exponent,
            tolerance,
        )
    )
    mass_steps = np.diff(field.mass)
    checks.append(
        _check(
            "oracle_mass_nondecreasing",
            bool(np.all(mass_steps >= -1e-12)),
            float(np.min(mass_steps)),
            -1e-12,
        )
    )
    return checks


@logger.namespaced("validate")
@log_runtime
def cmd_validate(config: RunConfig) -> int:
    """Runs every validation check and writes validation.json.

    Returns:
        0 if all checks pass, 2 if a solve fails, 3 if any check fails.
    """
    options = config.validate
    directory = config.output_directory
    os.makedirs(directory, exist_ok=True)
    params = config.problem_params()

    results = []
    for level in range(options["refinements"]):
        refined = dataclasses.replace(
            config,
            grid_cells=config.grid_cells * 2 ** level,
            grid_step=(
                None
                if config.grid_step is None
                else config.grid_step / 2 ** level
            ),
        )
        solver = ShootingSolver(
            refined.solver_config(), **refined.shooting_options()
        )
        try:
            results.append(solver.solve(params))
        except FracPMEError as error:
            logger.error(f"Solver failed at refinement {level}: {error}")
            write_json(
                {
                    "status": "failed",
                    "error": type(error).__name__,
                    "message": str(error),
                    "refinement": level,
                },
                os.path.join(directory, "validation.json"),
            )
            return EXIT_CODES["solver_failure"]

    checks = solution_checks(results[0], params, options, config.shoot_tol)

    residuals = [residual_eq2(r.profile, r.beta_star, params) for r in results]
    checks.append(
        _check(
            "residual_eq2_decreasing",
            bool(np.all(np.diff(residuals) < 0)),
            residuals,
            None,
        )
    )

    minimum_ratio = options["richardson_min_ratio"]
    tolerance = options["self_convergence_tolerance"]
    for name in ("beta_star", "eta_star"):
        values = [getattr(r, name) for r in results]
        ratio = _richardson_ratio(values[:3])
        checks.append(
            _check(
                f"richardson_{name}",
                bool(ratio >= minimum_ratio),
                ratio,
                minimum_ratio,
            )
        )
        change = abs(values[1] - values[0])
        checks.append(
            _check(f"self_convergence_{name}", change <= tolerance, change, tolerance)
        )

    if options["oracle"]:
        try:
            checks.extend(
                oracle_checks(
                    results[0], params, options, directory, config.output_format
                )
            )
        except FracPMEError as error:
            logger.error(f"Oracle failed: {error}")
            checks.append(_check("oracle", False, str(error), None))

    passed = all(check["passed"] for check in checks)
    write_json(
        {
            "alpha": params.alpha,
            "m": params.m,
            "beta_star": results[0].beta_star,
            "eta_star": results[0].eta_star,
            "checks": checks,
            "passed": passed,
        },
        os.path.join(directory, "validation.json"),
    )
    if not passed:
        return EXIT_CODES["validation_failure"]
    return EXIT_CODES["success"]
