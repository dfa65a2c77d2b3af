"""
Closed-form bounds for the self-similar problem.

For a shooting slope beta the image of the Volterra operator S_beta over the
space M is squeezed between two quadratics,

    g2(eta, beta) <= S_beta(Y)(eta) <= g1(eta, beta),

whose positive roots eta2(beta) <= eta1(beta) bracket the free boundary. The
same envelopes bound the front flux between f_minus(beta) and f_plus(beta).
g1 only has a root from the admissibility threshold beta0 on.
"""
from typing import Union

import numpy as np

from fracpme.data import BoundsReport, ProblemParams
from fracpme.mixins import BoundsDomainError
from fracpme.tools import special

# discriminants this close to zero are treated as zero (beta at beta0)
DISCRIMINANT_TOLERANCE = 1e-12

F_MINUS_PANELS = 512

ArrayLike = Union[float, np.ndarray]


def _as_output(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def beta0(params: ProblemParams) -> float:
    """Admissibility threshold (2 - alpha) / sqrt(2 Gamma(2 - alpha) (m + 1)).

    From this slope on, every operator image has a zero.
    """
    alpha, m = params.alpha, params.m
    return (2 - alpha) / np.sqrt(2 * special.gamma(2 - alpha) * (m + 1))


def eta1(beta: float, params: ProblemParams) -> float:
    """Smallest positive root of the upper envelope g1(., beta).

    Args:
        beta: Shooting slope, beta >= beta0(params).
        params: Problem parameters.

    Returns:
        The upper bound eta1(beta) for the free boundary.

    Raises:
        BoundsDomainError if beta < beta0, where g1 has no real root.
    """
    alpha, m = params.alpha, params.m
    discriminant = beta ** 2 - (2 - alpha) ** 2 / (
        2 * special.gamma(2 - alpha) * (m + 1)
    )
    if abs(discriminant) <= DISCRIMINANT_TOLERANCE:
        discriminant = 0.0
    elif discriminant < 0:
        raise BoundsDomainError(
            f"eta1 is undefined for beta = {beta} below beta0 = "
            f"{beta0(params)}."
        )
    # product of the roots is 2 / ((m + 1) a), no cancellation for large beta
    return 2.0 / ((m + 1) * (beta + np.sqrt(discriminant)))


def eta2(beta: float, params: ProblemParams) -> float:
    """Positive root of the lower envelope g2(., beta), always positive."""
    if beta < 0:
        raise BoundsDomainError(f"eta2 needs a nonnegative slope, got {beta}.")
    alpha, m = params.alpha, params.m
    discriminant = beta ** 2 + alpha ** 2 / (
        2 * special.gamma(2 - alpha) * (m + 1)
    )
    return 2.0 / ((m + 1) * (beta + np.sqrt(discriminant)))


def g1(eta: ArrayLike, beta: float, params: ProblemParams) -> ArrayLike:
    """Upper envelope 1 + (m+1)(-beta eta + (2-alpha)^2 eta^2 / (8 Gamma(2-alpha)))."""
    alpha, m = params.alpha, params.m
    eta = np.asarray(eta, dtype=float)
    value = 1 + (m + 1) * (
        -beta * eta
        + (2 - alpha) ** 2 * eta ** 2 / (8 * special.gamma(2 - alpha))
    )
    return _as_output(value)


def g2(eta: ArrayLike, beta: float, params: ProblemParams) -> ArrayLike:
    """Lower envelope 1 + (m+1)(-beta eta - alpha^2 eta^2 / (8 Gamma(2-alpha)))."""
    alpha, m = params.alpha, params.m
    eta = np.asarray(eta, dtype=float)
    value = 1 + (m + 1) * (
        -beta * eta - alpha ** 2 * eta ** 2 / (8 * special.gamma(2 - alpha))
    )
    return _as_output(value)


def f_plus(beta: float, params: ProblemParams) -> float:
    """Upper bound -beta + (1 - alpha/2) eta1(beta) / Gamma(2 - alpha) of the
    front flux.

    Raises:
        BoundsDomainError if beta < beta0.
    """
    alpha = params.alpha
    return -beta + (1 - alpha / 2) * eta1(beta, params) / special.gamma(
        2 - alpha
    )


def f_minus(beta: float, params: ProblemParams) -> float:
    """Lower bound of the front flux.

    Evaluates -beta + (1 - alpha/2) / Gamma(2 - alpha) times the integral of
    g2(z, beta)^(1/(1+m)) over [0, eta2(beta)] with composite Simpson.
    """
    alpha, m = params.alpha, params.m
    upper = eta2(beta, params)
    z = np.linspace(0.0, upper, 2 * F_MINUS_PANELS + 1)
    integrand = np.clip(g2(z, beta, params), 0.0, None) ** (1.0 / (1 + m))
    integral = special.simpson_integral(integrand, z[1] - z[0])
    return -beta + (1 - alpha / 2) / special.gamma(2 - alpha) * integral


def bounds_report(beta: float, params: ProblemParams) -> BoundsReport:
    """Evaluates every closed-form bound at one slope.

    Below beta0 the g1-based quantities are reported as None.
    """
    try:
        upper, flux_upper = eta1(beta, params), f_plus(beta, params)
    except BoundsDomainError:
        upper, flux_upper = None, None
    return BoundsReport(
        beta=float(beta),
        beta0=float(beta0(params)),
        eta1=None if upper is None else float(upper),
        eta2=float(eta2(beta, params)),
        f_plus=None if flux_upper is None else float(flux_upper),
        f_minus=float(f_minus(beta, params)),
    )
