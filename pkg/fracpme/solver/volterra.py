"""
The Volterra form of the self-similar problem.

With Y = U^(m+1) the problem is the fixed-point equation Y = A_beta(Y), where

    S_beta(Y)(eta) = 1 + (m+1) [-beta eta
                     + int_0^eta ((1 - alpha/2) eta - z) I U(z) dz]

and A_beta truncates S_beta(Y) at its smallest zero eta*. This module holds
the operators, the free-boundary detection and the pointwise checks of a
computed solution. The iteration itself is run by the PicardSolver.
"""
import warnings
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import optimize

from fracpme.data import ProblemParams, Profile
from fracpme.mixins import (
    BoundsDomainError,
    FreeBoundaryError,
    MembershipWarning,
    logger,
)
from fracpme.tools import bounds, ekoperator, special

# slopes this close below beta0 still count as admissible
ADMISSIBILITY_TOLERANCE = 1e-12

# pinned trajectories below this value count as zero
PINNED_FLOOR = 1e-12


class FrontLocation(NamedTuple):
    """Where a trajectory is truncated.

    `gap` is 0 when the trajectory has a zero at `eta_star` and the minimum
    of the trajectory, attained at `eta_star`, when it stays positive.
    """

    eta_star: float
    gap: float


def is_admissible(beta: float, params: ProblemParams) -> bool:
    """Whether beta >= beta0(params), up to rounding."""
    return beta >= bounds.beta0(params) - ADMISSIBILITY_TOLERANCE


def make_grid(
    beta: float,
    params: ProblemParams,
    grid_step: Optional[float] = None,
    grid_cells: int = 1024,
) -> Tuple[float, int]:
    """Grid spacing and node count for one shooting slope.

    For admissible slopes the grid covers [0, eta1(beta) + 4h], so the zero
    of S_beta is always interior. Below beta0, where eta1 is undefined, it
    covers [0, 2 eta1(beta0) + 4h].

    Returns:
        (grid_step, n_nodes)
    """
    if is_admissible(beta, params):
        reference = bounds.eta1(max(beta, bounds.beta0(params)), params)
        extent = reference
    else:
        reference = bounds.eta1(bounds.beta0(params), params)
        extent = 2.0 * reference
    step = grid_step if grid_step is not None else reference / grid_cells
    n_nodes = int(np.ceil(extent / step + 4.0 - 1e-9)) + 1
    return step, n_nodes


def initial_iterate(
    beta: float, params: ProblemParams, grid_step: float, n_nodes: int
) -> Profile:
    """The lower envelope g2(., beta) clipped to [0, 1], as a Y profile."""
    grid = grid_step * np.arange(n_nodes)
    values = np.clip(bounds.g2(grid, beta, params), 0.0, 1.0)
    return Profile(
        grid_step, values, bounds.eta2(beta, params), "Y", params.m
    )


def volterra_image(
    iu: np.ndarray, grid_step: float, beta: float, params: ProblemParams
) -> np.ndarray:
    """Evaluates S_beta at every node from the EK transform I U on the grid.

    The outer integral is split as (1 - alpha/2) eta int_0^eta I U dz -
    int_0^eta z I U dz, so the eta-dependent factor is applied exactly and
    both running integrals use cumulative Simpson.
    """
    alpha, m = params.alpha, params.m
    z = grid_step * np.arange(iu.size)
    first = special.cumulative_integral(iu, grid_step)
    second = special.cumulative_integral(z * iu, grid_step)
    return 1.0 + (m + 1) * (
        -beta * z + (1.0 - alpha / 2.0) * z * first - second
    )


def apply_S(
    Y: Profile,
    beta: float,
    params: ProblemParams,
    n_nodes: int = ekoperator.DEFAULT_NODES,
    adaptive: bool = True,
    max_nodes: int = ekoperator.MAX_NODES,
    check_admissible: bool = True,
) -> np.ndarray:
    """Applies the untruncated operator S_beta on the grid of Y.

    Args:
        Y: Current iterate, a Y (or U) profile in M.
        beta: Shooting slope.
        params: Problem parameters.
        n_nodes: Gauss-Jacobi node count of the EK operator.
        adaptive: Whether the node count is selected adaptively.
        max_nodes: Node cap of the adaptive selection.
        check_admissible: Whether to require beta >= beta0.

    Returns:
        The raw values of S_beta(Y) at every node. They may turn negative
        past the first zero.

    Raises:
        BoundsDomainError if check_admissible is set and beta < beta0.
    """
    if check_admissible and not is_admissible(beta, params):
        raise BoundsDomainError(
            f"S_beta needs beta >= beta0 = {bounds.beta0(params)}, got {beta}."
        )
    iu = ekoperator.ek_apply_grid(
        Y, params.alpha, n_nodes=n_nodes, adaptive=adaptive, max_nodes=max_nodes
    )
    return volterra_image(iu, Y.grid_step, beta, params)


def _first_crossing(raw: np.ndarray) -> Optional[int]:
    nonpositive = np.flatnonzero(raw[1:] <= 0.0)
    if nonpositive.size == 0:
        return None
    return int(nonpositive[0]) + 1


def _interpolant_root(raw: np.ndarray, grid_step: float, index: int) -> float:
    right = index * grid_step
    if raw[index] == 0.0:
        return right
    left = right - grid_step
    a, b = raw[index - 1], raw[index]

    def interpolant(x):
        return a + (b - a) * (x - left) / grid_step

    return float(
        optimize.bisect(interpolant, left, right, xtol=1e-15 * max(right, 1.0))
    )


def detect_eta_star(
    raw: np.ndarray,
    grid_step: float,
    beta: float,
    params: ProblemParams,
    check_bracket: bool = True,
) -> float:
    """Locates the smallest zero of an untruncated trajectory.

    Scans for the first sign change and refines the zero of the linear
    interpolant on that cell by bisection.

    Args:
        raw: Untruncated S_beta values on the grid, raw[0] = 1.
        grid_step: Grid spacing.
        beta: Shooting slope.
        params: Problem parameters.
        check_bracket: For admissible slopes, reject crossings beyond
            eta1(beta) + 2h and log crossings outside [eta2 - h, eta1 + h].

    Returns:
        The free boundary eta*.

    Raises:
        FreeBoundaryError if no sign change is found.
    """
    raw = np.asarray(raw, dtype=float)
    index = _first_crossing(raw)
    if index is None:
        raise FreeBoundaryError(
            f"No sign change up to eta = {grid_step * (raw.size - 1)} for "
            f"beta = {beta}."
        )
    eta_star = _interpolant_root(raw, grid_step, index)

    if check_bracket and is_admissible(beta, params):
        upper = bounds.eta1(max(beta, bounds.beta0(params)), params)
        lower = bounds.eta2(beta, params)
        if eta_star > upper + 2 * grid_step:
            raise FreeBoundaryError(
                f"First zero {eta_star} lies beyond eta1 + 2h = "
                f"{upper + 2 * grid_step} for beta = {beta}."
            )
        if not lower - grid_step <= eta_star <= upper + grid_step:
            logger.warning(
                f"Free boundary {eta_star} outside [{lower}, {upper}] "
                f"by more than one cell at beta = {beta}."
            )
    return eta_star


def locate_front(
    raw: np.ndarray, grid_step: float, beta: float, params: ProblemParams
) -> FrontLocation:
    """Like detect_eta_star, but tolerates trajectories without a zero.

    A trajectory that stays positive is truncated at the first local
    minimum of its descending branch, and that minimum is returned as the
    gap. Later minima are ignored, so a flat tail cannot move the front.
    """
    raw = np.asarray(raw, dtype=float)
    if _first_crossing(raw) is not None:
        return FrontLocation(
            detect_eta_star(raw, grid_step, beta, params, check_bracket=False),
            0.0,
        )
    rising = np.flatnonzero(np.diff(raw) >= 0.0)
    index = int(rising[0]) if rising.size else raw.size - 1
    return FrontLocation(index * grid_step, float(raw[index]))


def make_pinned_grid(
    front: float, grid_step: Optional[float] = None, grid_cells: int = 1024
) -> Tuple[float, int]:
    """Grid on [0, front] whose last node is the pinned front.

    Without a fixed `grid_step` the interval is split into `grid_cells`
    cells. With one, the cell count is front / grid_step rounded up, so the
    spacing never exceeds the requested step.

    Returns:
        (grid_step, n_nodes)
    """
    if not front > 0.0:
        raise FreeBoundaryError(f"Pinned front must be positive, got {front}.")
    if grid_step is None:
        cells = grid_cells
    else:
        cells = max(int(np.ceil(front / grid_step - 1e-9)), 8)
    return front / cells, cells + 1


def pinned_initial_iterate(
    params: ProblemParams, grid_step: float, n_nodes: int
) -> Profile:
    """The linear Y profile falling from 1 at the origin to 0 at the front."""
    front = grid_step * (n_nodes - 1)
    values = 1.0 - grid_step * np.arange(n_nodes) / front
    values[-1] = 0.0
    return Profile(grid_step, values, front, "Y", params.m)


def pinned_slope(
    iu: np.ndarray, grid_step: float, params: ProblemParams
) -> Tuple[float, float]:
    """Slope and front flux that make S_beta vanish at the last grid node.

    With A = int_0^front I U and B = int_0^front z I U, S_beta(front) = 0
    gives beta = 1/((m+1) front) + (1 - alpha/2) A - B / front, and the flux
    -beta + (1 - alpha/2) A reduces to (B - 1/(m+1)) / front. Both integrals
    use the cumulative rule of volterra_image, so the pin holds to rounding.

    Returns:
        (beta, flux)
    """
    alpha, m = params.alpha, params.m
    z = grid_step * np.arange(iu.size)
    front = z[-1]
    first = float(special.cumulative_integral(iu, grid_step)[-1])
    second = float(special.cumulative_integral(z * iu, grid_step)[-1])
    front_flux = (second - 1.0 / (m + 1)) / front
    beta = -front_flux + (1.0 - alpha / 2.0) * first
    return beta, front_flux


def pinned_front(
    raw: np.ndarray, grid_step: float, floor: float = PINNED_FLOOR
) -> float:
    """First point where a pinned trajectory drops to `floor`.

    The last node of a pinned trajectory is zero, so the crossing always
    exists. Values below `floor` are rounding noise of a trajectory that
    already touched zero.
    """
    shifted = np.asarray(raw, dtype=float) - floor
    shifted[-1] = min(shifted[-1], -floor)
    index = _first_crossing(shifted)
    return _interpolant_root(shifted, grid_step, index)


def extrapolate_front(Y: Profile, m: float) -> float:
    """Front of a no-flux profile from its pressure U^m.

    Near a front without flux Y behaves like (eta* - eta)^((m+1)/m), so the
    pressure U^m = Y^(m/(m+1)) is linear there. The front is where the line
    through the last two positive pressure values reaches zero. Falls back to
    the detected front if the pressure does not decrease there. The result
    stays within one cell of the last positive node.
    """
    values = np.clip(Y.as_y(m).values, 0.0, None)
    positive = np.flatnonzero((Y.grid < Y.eta_star) & (values > 0.0))
    if positive.size < 2 or positive[-1] != positive[-2] + 1:
        return float(Y.eta_star)
    last = int(positive[-1])
    pressure = values[last - 1 : last + 1] ** (m / (m + 1))
    drop = pressure[0] - pressure[1]
    if not drop > 0.0:
        return float(Y.eta_star)
    offset = min(pressure[1] / drop, 1.0)
    return float(Y.grid_step * (last + offset))


def truncate(
    raw: np.ndarray,
    grid_step: float,
    eta_star: float,
    m: float,
    clamp_tolerance: float = 1e-8,
) -> Profile:
    """Builds the Y profile of A_beta from raw values and the free boundary.

    Values before eta_star are clamped into [0, 1], values from eta_star on
    are set to 0. Clamping by more than `clamp_tolerance` issues a
    MembershipWarning.
    """
    values = np.array(raw, dtype=float)
    grid = grid_step * np.arange(values.size)
    inside = grid < eta_star
    clamped = np.clip(values[inside], 0.0, 1.0)
    amount = float(np.max(np.abs(clamped - values[inside]), initial=0.0))
    if amount > clamp_tolerance:
        logger.debug(f"Clamped the iterate into [0, 1] by {amount:.3g}.")
        warnings.warn(
            "Clamped the iterate into [0, 1] beyond the tolerance.",
            MembershipWarning,
        )
    values[inside] = clamped
    values[~inside] = 0.0
    return Profile(grid_step, values, eta_star, "Y", m)


def apply_A(
    Y: Profile,
    beta: float,
    params: ProblemParams,
    n_nodes: int = ekoperator.DEFAULT_NODES,
    adaptive: bool = True,
    max_nodes: int = ekoperator.MAX_NODES,
    clamp_tolerance: float = 1e-8,
) -> Profile:
    """The truncated operator A_beta.

    Args:
        Y: Current iterate in M.
        beta: Shooting slope, beta >= beta0.
        params: Problem parameters.
        n_nodes: Gauss-Jacobi node count of the EK operator.
        adaptive: Whether the node count is selected adaptively.
        max_nodes: Node cap of the adaptive selection.
        clamp_tolerance: Clamping amount reported with a MembershipWarning.

    Returns:
        A Y profile in M with its detected free boundary.

    Raises:
        BoundsDomainError if beta < beta0.
        FreeBoundaryError if S_beta(Y) has no detectable zero.
    """
    raw = apply_S(Y, beta, params, n_nodes, adaptive, max_nodes)
    eta_star = detect_eta_star(raw, Y.grid_step, beta, params)
    return truncate(raw, Y.grid_step, eta_star, params.m, clamp_tolerance)


def integrate_to_front(
    values: np.ndarray, grid_step: float, eta_star: float
) -> float:
    """Integral of gridded values over [0, eta_star].

    Cumulative Simpson up to the last node before eta_star plus a trapezoid
    over the partial cell.
    """
    values = np.asarray(values, dtype=float)
    grid = grid_step * np.arange(values.size)
    last = int(np.searchsorted(grid, eta_star, side="right")) - 1
    last = min(max(last, 0), values.size - 1)
    running = special.cumulative_integral(values[: last + 1], grid_step)
    partial = eta_star - grid[last]
    if partial <= 0.0:
        return float(running[-1])
    end_value = float(np.interp(eta_star, grid, values))
    return float(running[-1] + partial * (values[last] + end_value) / 2.0)


def residual_eq2(
    profile: Profile,
    beta: float,
    params: ProblemParams,
    threshold: float = 0.05,
    n_nodes: int = ekoperator.DEFAULT_NODES,
) -> float:
    """Pointwise defect of the differential form of the profile equation.

    Evaluates |(U^m U')' - [(1 - alpha) I U - (alpha/2) eta (I U)']| with
    centered differences at the interior nodes where U > threshold and both
    neighbours lie inside the support. (U^m U')' is computed as
    Y'' / (m + 1).

    Args:
        profile: A converged U or Y profile.
        beta: Slope of the solution, unused by the differences themselves.
        params: Problem parameters.
        threshold: Nodes with U <= threshold are skipped.
        n_nodes: Initial Gauss-Jacobi node count.

    Returns:
        The maximum defect, 0 if no node qualifies.
    """
    alpha, m = params.alpha, params.m
    y = profile.as_y(m)
    u = y.as_u()
    h = y.grid_step
    iu = ekoperator.ek_apply_grid(y, alpha, n_nodes=n_nodes)

    interior = np.arange(1, y.n_nodes - 1)
    grid = y.grid
    mask = (u.values[interior] > threshold) & (grid[interior + 1] < y.eta_star)
    nodes = interior[mask]
    if nodes.size == 0:
        return 0.0

    left = (
        y.values[nodes + 1] - 2.0 * y.values[nodes] + y.values[nodes - 1]
    ) / (h ** 2 * (m + 1))
    derivative = (iu[nodes + 1] - iu[nodes - 1]) / (2.0 * h)
    right = (1.0 - alpha) * iu[nodes] - alpha / 2.0 * grid[nodes] * derivative
    defect = float(np.max(np.abs(left - right)))
    logger.debug(f"Differential defect at beta = {beta}: {defect}")
    return defect


def moment_identity_residual(
    profile: Profile,
    params: ProblemParams,
    n_nodes: int = ekoperator.DEFAULT_NODES,
) -> float:
    """Defect of int_0^eta* z I U(z) dz = 1 / (m + 1).

    The identity holds for the no-flux solution; for other slopes the
    defect equals eta* times the front flux.
    """
    y = profile.as_y(params.m)
    iu = ekoperator.ek_apply_grid(y, params.alpha, n_nodes=n_nodes)
    moment = integrate_to_front(y.grid * iu, y.grid_step, y.eta_star)
    return abs(moment - 1.0 / (params.m + 1))
