"""
This file stores the Profile class, a function of the similarity variable
eta sampled on a uniform grid together with its free boundary eta*.

A Profile stores either U itself or Y = U^(m+1), the variable in which the
Volterra form of the self-similar problem is a fixed-point equation.
"""
from dataclasses import dataclass, replace
from typing import Callable, List, Optional

import numpy as np
from typing_extensions import Literal

from fracpme.mixins import ParameterError


@dataclass
class Profile:
    """A gridded, compactly supported profile.

    Node i sits at eta = i * grid_step. Between nodes the profile is linear.
    At and beyond `eta_star` it is identically zero; the last positive node
    is joined linearly to the zero at `eta_star`. A profile with
    `eta_star = inf` is an untruncated fixture and is extended beyond its
    last node by linear extrapolation from the last two nodes, clamped to
    [0, 1].

    Args:
        grid_step: Spacing of the uniform grid.
        values: Node values; values[i] is the value at i * grid_step.
        eta_star: The free boundary (support is [0, eta_star]).
        represents: "U" if values store U, "Y" if they store U^(m+1).
        m: Nonlinearity exponent, needed to convert between U and Y.
    """

    grid_step: float
    values: np.ndarray
    eta_star: float = np.inf
    represents: Literal["U", "Y"] = "U"
    m: Optional[float] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.grid_step <= 0:
            raise ParameterError("grid_step must be positive.")
        if self.values.ndim != 1 or self.values.size < 2:
            raise ParameterError("A profile needs at least two grid nodes.")
        if self.represents not in ("U", "Y"):
            raise ParameterError("represents must be either 'U' or 'Y'.")
        if self.represents == "Y" and self.m is None:
            raise ParameterError("A Y profile needs the exponent m.")

    @classmethod
    def from_function(
        cls,
        function: Callable[[np.ndarray], np.ndarray],
        grid_step: float,
        n_nodes: int,
        eta_star: float = np.inf,
        represents: Literal["U", "Y"] = "U",
        m: Optional[float] = None,
    ) -> "Profile":
        """Samples a function on a uniform grid, zeroed from eta_star on."""
        grid = grid_step * np.arange(n_nodes)
        values = np.where(grid < eta_star, function(grid), 0.0)
        return cls(grid_step, values, eta_star, represents, m)

    @property
    def n_nodes(self) -> int:
        return self.values.size

    @property
    def grid(self) -> np.ndarray:
        return self.grid_step * np.arange(self.n_nodes)

    @property
    def grid_end(self) -> float:
        return self.grid_step * (self.n_nodes - 1)

    def as_u(self) -> "Profile":
        """Returns the U representation of this profile."""
        if self.represents == "U":
            return self
        u = np.clip(self.values, 0.0, None) ** (1.0 / (self.m + 1))
        return replace(self, values=u, represents="U")

    def as_y(self, m: Optional[float] = None) -> "Profile":
        """Returns the Y = U^(m+1) representation of this profile."""
        if self.represents == "Y":
            return self
        m = self.m if m is None else m
        if m is None:
            raise ParameterError("Converting to Y needs the exponent m.")
        y = np.clip(self.values, 0.0, None) ** (m + 1)
        return replace(self, values=y, represents="Y", m=m)

    def evaluate(self, points) -> np.ndarray:
        """Evaluates the piecewise-linear profile at arbitrary points.

        Args:
            points: Nonnegative evaluation points, any shape.

        Returns:
            Profile values with the same shape as `points`.
        """
        points = np.asarray(points, dtype=float)
        grid = self.grid
        result = np.zeros_like(points)

        inside = points < self.eta_star
        if not np.any(inside):
            return result

        if np.isfinite(self.eta_star) and self.eta_star <= self.grid_end:
            keep = grid < self.eta_star
            knots = np.append(grid[keep], self.eta_star)
            knot_values = np.append(self.values[keep], 0.0)
            result[inside] = np.interp(points[inside], knots, knot_values)
            return result

        on_grid = inside & (points <= self.grid_end)
        result[on_grid] = np.interp(points[on_grid], grid, self.values)

        beyond = inside & (points > self.grid_end)
        if np.any(beyond):
            slope = (self.values[-1] - self.values[-2]) / self.grid_step
            extrapolated = self.values[-1] + slope * (
                points[beyond] - self.grid_end
            )
            result[beyond] = np.clip(extrapolated, 0.0, 1.0)
        return result

    def membership_violations(self, tolerance: float = 1e-12) -> List[str]:
        """Lists the invariants of the space M this profile violates.

        Checks the boundary value 1 at the origin, the range [0, 1] and the
        compact support [0, eta_star].
        """
        violations = []
        if abs(self.values[0] - 1.0) > tolerance:
            violations.append(f"value at the origin is {self.values[0]}, not 1")
        if np.any(self.values < -tolerance) or np.any(
            self.values > 1 + tolerance
        ):
            violations.append("values leave the interval [0, 1]")
        if np.isfinite(self.eta_star):
            outside = self.grid >= self.eta_star
            if np.any(np.abs(self.values[outside]) > tolerance):
                violations.append("profile is nonzero beyond eta_star")
        return violations

    def is_nonincreasing(self, tolerance: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.values) <= tolerance))
