"""
The Erdelyi-Kober fractional integral that appears after the self-similar
reduction,

    I U(eta) = 1 / Gamma(1 - alpha) * int_0^1 (1 - s)^(-alpha) U(s^(-alpha/2) eta) ds.

Arguments s^(-alpha/2) eta are never smaller than eta, so for a profile
supported on [0, eta*] only s in [s0, 1] with s0 = (eta / eta*)^(2/alpha)
contributes. The gridded path maps a Gauss-Jacobi rule onto [s0, 1]; the
callable path additionally resolves the s -> 0 end for fixtures with
unbounded support.
"""
import warnings
from typing import Callable, Union

import numpy as np

from fracpme.data import Profile
from fracpme.mixins import QuadratureWarning, SpecialFunctionDomainError, logger
from fracpme.tools import special

DEFAULT_NODES = 32
MAX_NODES = 512
SPOT_CHECK_TOLERANCE = 1e-9
SPOT_CHECKS = 8

# graded panels toward s = 0 for callables with unbounded support
GRADING_RATIO = 0.1
GRADED_LEVELS = 12
GRADED_PANEL_NODES = 20


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise SpecialFunctionDomainError(
            f"alpha must lie in (0, 1), got {alpha}."
        )


def _ek_values(
    function: Callable[[np.ndarray], np.ndarray],
    etas: np.ndarray,
    alpha: float,
    support: float,
    rule: special.QuadratureRule,
) -> np.ndarray:
    """Vectorized Gauss-Jacobi evaluation over the contributing s-range."""
    etas = np.asarray(etas, dtype=float)
    result = np.zeros_like(etas)
    active = etas < support
    if not np.any(active):
        return result

    eta = etas[active]
    if np.isfinite(support):
        s0 = (eta / support) ** (2.0 / alpha)
    else:
        s0 = np.zeros_like(eta)

    s = s0[:, None] + (1.0 - s0)[:, None] * rule.nodes[None, :]
    arguments = eta[:, None] * s ** (-alpha / 2.0)
    samples = function(arguments)
    result[active] = (
        (1.0 - s0) ** (1.0 - alpha)
        * (samples @ rule.weights)
        / special.gamma(1.0 - alpha)
    )
    return result


def _profile_function(profile: Profile) -> Callable[[np.ndarray], np.ndarray]:
    u = profile.as_u()
    return u.evaluate


def select_node_count(
    profile: Profile,
    alpha: float,
    n_nodes: int = DEFAULT_NODES,
    max_nodes: int = MAX_NODES,
    tolerance: float = SPOT_CHECK_TOLERANCE,
) -> int:
    """Picks the Gauss-Jacobi node count for a gridded profile.

    Starting from `n_nodes`, the count is doubled while the rules with n and
    2n nodes disagree by more than `tolerance` at a handful of spot-check
    nodes spread over the support.

    Args:
        profile: Profile the operator is applied to.
        alpha: Order of the operator.
        n_nodes: Initial node count.
        max_nodes: Largest node count tried.
        tolerance: Absolute agreement required at the spot checks.

    Returns:
        The selected node count.
    """
    _check_alpha(alpha)
    function = _profile_function(profile)
    support = profile.eta_star
    grid = profile.grid
    inside = grid[grid < support]
    if inside.size == 0:
        return n_nodes
    picks = np.unique(
        np.linspace(0, inside.size - 1, SPOT_CHECKS).round().astype(int)
    )
    spots = inside[picks]

    n = n_nodes
    coarse = _ek_values(function, spots, alpha, support, special.jacobi_rule(alpha, n))
    while 2 * n <= max_nodes:
        fine = _ek_values(
            function, spots, alpha, support, special.jacobi_rule(alpha, 2 * n)
        )
        disagreement = float(np.max(np.abs(fine - coarse)))
        if disagreement <= tolerance:
            return n
        n, coarse = 2 * n, fine

    logger.debug(
        f"Gauss-Jacobi node cap {max_nodes} reached for alpha = {alpha}."
    )
    warnings.warn(
        "Gauss-Jacobi node cap reached before spot checks agreed.",
        QuadratureWarning,
    )
    return n


def ek_apply_grid(
    profile: Profile,
    alpha: float,
    n_nodes: int = DEFAULT_NODES,
    adaptive: bool = True,
    max_nodes: int = MAX_NODES,
) -> np.ndarray:
    """Applies the operator at every node of the profile's grid.

    Args:
        profile: A U or Y profile. Y profiles are converted with their m.
        alpha: Order of the operator, 0 < alpha < 1.
        n_nodes: Gauss-Jacobi node count, or the starting count if adaptive.
        adaptive: Whether to select the node count with `select_node_count`.
        max_nodes: Node cap of the adaptive selection.

    Returns:
        I U at every grid node.
    """
    _check_alpha(alpha)
    if adaptive:
        n_nodes = select_node_count(profile, alpha, n_nodes, max_nodes)
    return _ek_values(
        _profile_function(profile),
        profile.grid,
        alpha,
        profile.eta_star,
        special.jacobi_rule(alpha, n_nodes),
    )


def ek_apply_function(
    function: Callable[[np.ndarray], np.ndarray],
    eta: float,
    alpha: float,
    support: float = np.inf,
    n_nodes: int = DEFAULT_NODES,
) -> float:
    """Applies the operator to a vectorized callable.

    With finite `support` the callable is taken to vanish from `support` on
    and the mapped Gauss-Jacobi rule is used. With unbounded support the
    s-range is split at 1/2: Gauss-Jacobi on [1/2, 1], geometrically graded
    Gauss-Legendre panels on [0, 1/2] and a geometric extrapolation of the
    panel contributions for the remainder next to s = 0. Power-law
    callables eta^p with p < 2/alpha are integrated to near machine
    precision this way.

    Args:
        function: Vectorized U.
        eta: Evaluation point, nonnegative.
        alpha: Order of the operator.
        support: Right end of the support of U.
        n_nodes: Gauss-Jacobi node count.

    Returns:
        I U(eta).
    """
    _check_alpha(alpha)
    if eta < 0:
        raise SpecialFunctionDomainError(f"eta must be nonnegative, got {eta}.")
    if np.isfinite(support):
        value = _ek_values(
            function,
            np.array([eta]),
            alpha,
            support,
            special.jacobi_rule(alpha, n_nodes),
        )
        return float(value[0])

    def integrand(s):
        return function(eta * s ** (-alpha / 2.0))

    # [1/2, 1]: (1 - s)^(-alpha) = 2^(-alpha) (1 - t)^(-alpha) with s = (1 + t)/2
    jacobi = special.jacobi_rule(alpha, n_nodes)
    upper = 2.0 ** (alpha - 1.0) * float(
        np.dot(jacobi.weights, integrand(0.5 + 0.5 * jacobi.nodes))
    )

    legendre = special.gauss_legendre_rule(GRADED_PANEL_NODES)
    contributions = []
    right = 0.5
    for _ in range(GRADED_LEVELS):
        left = right * GRADING_RATIO
        s = left + (right - left) * legendre.nodes
        contributions.append(
            (right - left)
            * float(np.dot(legendre.weights, (1.0 - s) ** (-alpha) * integrand(s)))
        )
        right = left

    tail = 0.0
    last, previous = contributions[-1], contributions[-2]
    if previous != 0.0 and last != 0.0:
        ratio = last / previous
        if 0.0 < ratio < 1.0:
            tail = last * ratio / (1.0 - ratio)
        else:
            warnings.warn(
                "Panel contributions near s = 0 do not decay geometrically.",
                QuadratureWarning,
            )

    return (upper + sum(contributions) + tail) / special.gamma(1.0 - alpha)


def ek_apply(
    profile: Union[Profile, Callable[[np.ndarray], np.ndarray]],
    eta: float,
    alpha: float,
    n_nodes: int = DEFAULT_NODES,
    adaptive: bool = True,
    max_nodes: int = MAX_NODES,
) -> float:
    """Applies the Erdelyi-Kober operator at one point.

    A gridded Profile goes through the same node selection as
    `ek_apply_grid`, so pointwise and gridded values agree at grid nodes.

    Args:
        profile: A gridded Profile, or a vectorized callable with unbounded
            support.
        eta: Evaluation point, nonnegative.
        alpha: Order of the operator, 0 < alpha < 1.
        n_nodes: Gauss-Jacobi node count, or the starting count if adaptive.
        adaptive: Whether to select the node count with `select_node_count`.
            Ignored for callables.
        max_nodes: Node cap of the adaptive selection.

    Returns:
        I U(eta), in [0, 1/Gamma(2 - alpha)] for profiles in M.
    """
    if not isinstance(profile, Profile):
        return ek_apply_function(profile, eta, alpha, n_nodes=n_nodes)
    _check_alpha(alpha)
    if eta < 0:
        raise SpecialFunctionDomainError(f"eta must be nonnegative, got {eta}.")
    if adaptive:
        n_nodes = select_node_count(profile, alpha, n_nodes, max_nodes)
    value = _ek_values(
        _profile_function(profile),
        np.array([float(eta)]),
        alpha,
        profile.eta_star,
        special.jacobi_rule(alpha, n_nodes),
    )
    return float(value[0])
