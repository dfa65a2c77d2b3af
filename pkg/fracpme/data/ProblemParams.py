"""
This file stores the ProblemParams class, the pair (alpha, m) that fixes one
instance of the time-fractional porous medium equation

    d^alpha_t u = (u^m u_x)_x,    u(x, 0) = 0,    u(0, t) = 1.
"""
import numbers
from dataclasses import dataclass

import numpy as np

from fracpme.mixins import ParameterError


@dataclass(frozen=True)
class ProblemParams:
    """Order of the time derivative and nonlinearity exponent.

    Args:
        alpha: Order of the fractional time derivative, 0 < alpha < 1.
        m: Exponent of the degenerate diffusivity u^m, m > 1.

    Raises:
        ParameterError if either value is outside its range.
    """

    alpha: float
    m: float

    def __post_init__(self):
        violations = self.violations(self.alpha, self.m)
        if violations:
            raise ParameterError("; ".join(violations))

    @staticmethod
    def violations(alpha: float, m: float):
        """Lists every constraint violated by the pair (alpha, m)."""
        violations = []
        if not _is_real(alpha) or not 0 < alpha < 1:
            violations.append(f"alpha must satisfy 0 < alpha < 1, got {alpha!r}")
        if not _is_real(m) or not m > 1:
            violations.append(f"m must satisfy m > 1, got {m!r}")
        return violations

    @property
    def front_exponent(self) -> float:
        """Self-similar exponent alpha / 2 of eta = x t^(-alpha/2)."""
        return self.alpha / 2


def _is_real(value) -> bool:
    return (
        isinstance(value, numbers.Real)
        and not isinstance(value, bool)
        and bool(np.isfinite(value))
    )
