"""
This file stores the SolverConfig class, the numerical settings shared by the
PicardSolver and the ShootingSolver.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from fracpme.mixins import ParameterError


@dataclass(frozen=True)
class SolverConfig:
    """Settings of the fixed-point and shooting iterations.

    Args:
        grid_step: Spacing of the eta-grid. If None, eta1(beta) / grid_cells
            is used (eta1(beta0) / grid_cells below beta0).
        grid_cells: Number of cells between 0 and eta1 when grid_step is None.
        picard_tol: Sup-norm change at which the Picard iteration stops.
        max_picard_iters: Maximum number of Picard sweeps.
        damping: Relaxation factor of the Picard update, in (0, 1].
        n_nodes: (Initial) Gauss-Jacobi node count of the EK operator.
        max_nodes: Node cap of the adaptive node selection.
        adaptive_quadrature: Whether to select the node count adaptively.
        clamp_tolerance: Clamping into [0, 1] beyond this amount is reported
            with a MembershipWarning.

    Raises:
        ParameterError listing every violated constraint.
    """

    grid_step: Optional[float] = None
    grid_cells: int = 1024
    picard_tol: float = 1e-10
    max_picard_iters: int = 500
    damping: float = 1.0
    n_nodes: int = 32
    max_nodes: int = 512
    adaptive_quadrature: bool = True
    clamp_tolerance: float = 1e-8

    def __post_init__(self):
        violations = self.violations()
        if violations:
            raise ParameterError("; ".join(violations))

    def violations(self) -> List[str]:
        """Lists every constraint violated by this configuration."""
        violations = []
        if self.grid_step is not None and not (
            np.isfinite(self.grid_step) and self.grid_step > 0
        ):
            violations.append(
                f"grid_step must be positive, got {self.grid_step}"
            )
        if self.grid_cells < 8:
            violations.append(
                f"grid_cells must be at least 8, got {self.grid_cells}"
            )
        if not self.picard_tol > 0:
            violations.append(
                f"picard_tol must be positive, got {self.picard_tol}"
            )
        if self.max_picard_iters < 1:
            violations.append(
                "max_picard_iters must be a positive integer, got "
                f"{self.max_picard_iters}"
            )
        if not 0 < self.damping <= 1:
            violations.append(
                f"damping must lie in (0, 1], got {self.damping}"
            )
        if self.n_nodes < 2:
            violations.append(f"n_nodes must be at least 2, got {self.n_nodes}")
        if self.max_nodes < self.n_nodes:
            violations.append(
                f"max_nodes ({self.max_nodes}) must not be below n_nodes "
                f"({self.n_nodes})"
            )
        if not self.clamp_tolerance >= 0:
            violations.append(
                f"clamp_tolerance must be nonnegative, got {self.clamp_tolerance}"
            )
        return violations
