"""
Foundation numerics: the gamma function and the quadrature rules used by the
Erdelyi-Kober operator and the outer Volterra integrals.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from fracpme.mixins import SpecialFunctionDomainError


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a rule on the open interval (0, 1).

    Attributes:
        nodes: Strictly increasing abscissae in (0, 1).
        weights: Positive weights.
        kind: "gauss_jacobi_alpha" for rules carrying the weight
            (1 - s)^(-alpha), "composite_smooth" for unweighted rules.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def integrate(self, function: Callable[[np.ndarray], np.ndarray]) -> float:
        """Applies the rule to a vectorized integrand."""
        return float(np.dot(self.weights, function(self.nodes)))


def gamma(x: float) -> float:
    """The gamma function on the positive half-line.

    Args:
        x: Positive argument.

    Returns:
        Gamma(x).

    Raises:
        SpecialFunctionDomainError if x <= 0.
    """
    if not np.isfinite(x) or x <= 0:
        raise SpecialFunctionDomainError(
            f"gamma is only evaluated for positive arguments, got {x}."
        )
    return float(special.gamma(x))


@lru_cache(maxsize=64)
def jacobi_rule(alpha: float, n: int) -> QuadratureRule:
    """Gauss-Jacobi rule for the weight (1 - s)^(-alpha) on (0, 1).

    The rule integrates (1 - s)^(-alpha) p(s) exactly for polynomials p of
    degree up to 2n - 1.

    Args:
        alpha: Exponent of the endpoint singularity, 0 < alpha < 1.
        n: Number of nodes, at least 2.

    Returns:
        A QuadratureRule of kind "gauss_jacobi_alpha".

    Raises:
        SpecialFunctionDomainError for alpha outside (0, 1) or n < 2.
    """
    if not 0 < alpha < 1:
        raise SpecialFunctionDomainError(
            f"Jacobi weight exponent must lie in (0, 1), got {alpha}."
        )
    if n < 2:
        raise SpecialFunctionDomainError(f"Need at least two nodes, got {n}.")

    # roots_jacobi uses the weight (1 - x)^a (1 + x)^b on [-1, 1]
    x, w = special.roots_jacobi(n, -alpha, 0.0)
    nodes = (x + 1.0) / 2.0
    weights = w * 2.0 ** (alpha - 1.0)
    return QuadratureRule(nodes, weights, "gauss_jacobi_alpha")


@lru_cache(maxsize=64)
def gauss_legendre_rule(n: int, panels: int = 1) -> QuadratureRule:
    """Composite Gauss-Legendre rule on (0, 1).

    Args:
        n: Nodes per panel.
        panels: Number of equal panels.

    Returns:
        A QuadratureRule of kind "composite_smooth".
    """
    if n < 1 or panels < 1:
        raise SpecialFunctionDomainError("Need at least one node and panel.")
    x, w = np.polynomial.legendre.leggauss(n)
    offsets = np.arange(panels)[:, None] / panels
    nodes = (offsets + (x[None, :] + 1.0) / (2.0 * panels)).ravel()
    weights = np.tile(w / (2.0 * panels), panels)
    return QuadratureRule(nodes, weights, "composite_smooth")


def simpson_integral(values: np.ndarray, step: float) -> float:
    """Composite Simpson integral of samples on a uniform grid.

    Falls back to the trapezoidal rule for fewer than three samples.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    if values.size == 2:
        return float(step * (values[0] + values[1]) / 2.0)
    return float(integrate.simpson(values, dx=step))


def cumulative_integral(values: np.ndarray, step: float) -> np.ndarray:
    """Running Simpson integral from the first node to every node.

    The first element is 0.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return integrate.cumulative_trapezoid(values, dx=step, initial=0.0)
    return integrate.cumulative_simpson(values, dx=step, initial=0.0)
