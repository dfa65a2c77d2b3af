"""
This file defines the FractionalPorousMediumSimulator, which is a subclass of
the FieldSimulator. It time-steps

    d^alpha_t u = (u^m u_x)_x,    u(x, 0) = 0,    u(0, t) = 1,

on [0, L] with u(L, t) = 0, using the L1 scheme with the full memory in time
and a semi-implicit, conservative finite-volume discretization in space.
Since u(x, 0) = 0 the Riemann-Liouville and Caputo forms of the derivative
coincide, so the L1 scheme applies directly.
"""
import warnings
from typing import Optional

import numpy as np
from scipy import linalg
from tqdm.auto import tqdm

from fracpme.data import PdeField, ProblemParams
from fracpme.mixins import (
    PdeOracleError,
    PdeOracleWarning,
    log_runtime,
    logger,
)
from fracpme.simulator.FieldSimulator import FieldSimulator
from fracpme.simulator.oracle_utilities import l1_weights
from fracpme.tools import bounds, special

INSTABILITY_TOLERANCE = 1e-6


class FractionalPorousMediumSimulator(FieldSimulator):
    """
    Simulate the time-fractional porous medium equation on a half-line proxy.

    Each step solves

        c b_0 u^n - L(u*) u^n = c (b_0 u^(n-1) - H^n),

    where c = 1 / (Gamma(2 - alpha) dt^alpha), H^n is the L1 memory sum of
    the earlier increments and L(u*) the three-point diffusion operator with
    interface diffusivity (u*_i^m + u*_(i+1)^m) / 2. The lagged state u*
    starts at u^(n-1) and is updated by a fixed number of Picard
    corrections. The right-hand side is a convex combination of earlier
    levels, so the solution stays in [0, 1] up to rounding.

    Args:
        params: Problem parameters (alpha, m).
        final_time: Simulated time T.
        nx: Number of spatial intervals.
        nt: Number of time steps.
        length: Domain length. Defaults to 1.5 eta1(beta0) T^(alpha/2), so
            the front never reaches the right boundary.
        picard_corrections: Linear solves per time step.
        progress: Whether to display a progress bar.

    Raises:
        PdeOracleError if a resolution or the time horizon is not positive.
    """

    def __init__(
        self,
        params: ProblemParams,
        final_time: float = 1.0,
        nx: int = 512,
        nt: int = 2048,
        length: Optional[float] = None,
        picard_corrections: int = 3,
        progress: bool = False,
    ):
        if nx < 2 or nt < 1:
            raise PdeOracleError("Need at least two intervals and one step.")
        if final_time <= 0:
            raise PdeOracleError("The final time must be positive.")
        if picard_corrections < 1:
            raise PdeOracleError("Need at least one linear solve per step.")

        self.params = params
        self.final_time = final_time
        self.nx = nx
        self.nt = nt
        if length is None:
            length = (
                1.5
                * bounds.eta1(bounds.beta0(params), params)
                * final_time ** (params.alpha / 2.0)
            )
        if length <= 0:
            raise PdeOracleError("The domain length must be positive.")
        self.length = length
        self.picard_corrections = picard_corrections
        self.progress = progress

        self.dx = length / nx
        self.dt = final_time / nt
        self.weights = l1_weights(params.alpha, nt)
        self.scale = 1.0 / (
            special.gamma(2.0 - params.alpha) * self.dt ** params.alpha
        )

    def memory(self, field: PdeField, t_index: int) -> np.ndarray:
        """L1 memory sum of the increments before level `t_index`."""
        if t_index < 2:
            return np.zeros(field.nx + 1)
        increments = (
            field.u[t_index - 1 : 0 : -1] - field.u[t_index - 2 :: -1]
        )
        return self.weights[1:t_index] @ increments

    def _solve_linear(
        self, lagged: np.ndarray, rhs: np.ndarray
    ) -> np.ndarray:
        m = self.params.m
        interface = 0.5 * (lagged[:-1] ** m + lagged[1:] ** m) / self.dx ** 2
        left, right = interface[:-1], interface[1:]

        banded = np.zeros((3, self.nx - 1))
        banded[0, 1:] = -right[:-1]
        banded[1, :] = self.scale * self.weights[0] + left + right
        banded[2, :-1] = -left[1:]

        b = rhs[1:-1].copy()
        # Dirichlet data u(0) = 1 and u(L) = 0
        b[0] += left[0] * 1.0
        solution = np.empty(self.nx + 1)
        solution[0], solution[-1] = 1.0, 0.0
        solution[1:-1] = linalg.solve_banded((1, 1), banded, b)
        return solution

    def step(self, field: PdeField, t_index: int) -> np.ndarray:
        """Computes time level `t_index` in place.

        Args:
            field: Field with every earlier level filled.
            t_index: Level to compute, 1 <= t_index <= nt.

        Returns:
            The new row of the field.

        Raises:
            PdeOracleError if the solution leaves [0, 1] by more than 1e-6.
        """
        previous = field.u[t_index - 1]
        rhs = self.scale * (
            self.weights[0] * previous - self.memory(field, t_index)
        )
        lagged = previous
        for _ in range(self.picard_corrections):
            lagged = self._solve_linear(np.clip(lagged, 0.0, 1.0), rhs)

        if np.any(np.abs(lagged) > 1.0 + INSTABILITY_TOLERANCE) or np.any(
            lagged < -INSTABILITY_TOLERANCE
        ):
            raise PdeOracleError(
                f"Solution left [0, 1] at t = {t_index * field.dt} "
                f"(range [{lagged.min()}, {lagged.max()}])."
            )
        row = np.clip(lagged, 0.0, 1.0)
        if np.any(row != lagged):
            field.clipped.append(t_index)
        field.u[t_index] = row
        return row

    @logger.namespaced("FractionalPorousMediumSimulator")
    @log_runtime
    def simulate(self) -> PdeField:
        """Time-steps from the dry initial state to the final time.

        Returns:
            The PdeField with all nt + 1 levels.
        """
        logger.info(
            f"Simulating alpha = {self.params.alpha}, m = {self.params.m} "
            f"on [0, {self.length:.6g}] x [0, {self.final_time}] with "
            f"nx = {self.nx}, nt = {self.nt}"
        )
        field = PdeField.empty(
            self.dx, self.dt, self.nx, self.nt, self.params.alpha, self.params.m
        )
        for t_index in tqdm(range(1, self.nt + 1), disable=not self.progress):
            self.step(field, t_index)

        if field.clipped:
            warnings.warn(
                f"Clipped rounding noise at {len(field.clipped)} time levels.",
                PdeOracleWarning,
            )
        return field
