"""
This file stores a subclass of ProfileSolver, the PicardSolver. For a fixed
shooting slope beta it iterates

    Y_{k+1} = (1 - damping) Y_k + damping A_beta(Y_k)

from the clipped lower envelope g2(., beta) until the sup-norm change drops
below the tolerance. The free boundary is re-detected at every sweep.

Below beta0 the iteration can be run in gap mode: a trajectory without a zero
is truncated at the first minimum of its descending branch and that minimum is
reported as the front gap.

The pinned mode fixes the front instead of the slope. Every sweep solves for
the beta at which the trajectory vanishes at the pinned front, which is the
form the ShootingSolver searches over.
"""
from typing import Optional, Tuple

import numpy as np

from fracpme.data import FixedPointDiagnostics, ProblemParams, Profile
from fracpme.mixins import BoundsDomainError, PicardConvergenceError, logger
from fracpme.solver import volterra
from fracpme.solver.ProfileSolver import ProfileSolver
from fracpme.solver.SolverConfig import SolverConfig
from fracpme.tools import bounds, ekoperator


class PicardSolver(ProfileSolver):
    """
    Fixed-point iteration of the truncated Volterra operator at one slope.

    Args:
        config: Numerical settings. Defaults to SolverConfig().
    """

    def __init__(self, config: Optional[SolverConfig] = None):
        super().__init__(config)

    def solve(
        self,
        params: ProblemParams,
        beta: float,
        initial: Optional[Profile] = None,
        allow_gap: bool = False,
    ) -> Tuple[Profile, FixedPointDiagnostics]:
        """Computes the fixed point Y = A_beta(Y).

        Args:
            params: Problem parameters.
            beta: Shooting slope.
            initial: Optional starting iterate, resampled onto the solver
                grid. Defaults to the clipped lower envelope g2(., beta).
            allow_gap: Whether trajectories without a zero are accepted
                (truncated at their minimum). Required below beta0.

        Returns:
            The fixed point as a Y profile and the iteration diagnostics.

        Raises:
            BoundsDomainError if beta < beta0 and allow_gap is not set.
            FreeBoundaryError if a trajectory has no zero and allow_gap is
                not set.
            PicardConvergenceError if the tolerance is not met within
                max_picard_iters sweeps.
        """
        config = self.config
        if not allow_gap and not volterra.is_admissible(beta, params):
            raise BoundsDomainError(
                f"Picard iteration needs beta >= beta0 = "
                f"{bounds.beta0(params)}, got {beta}."
            )

        grid_step, n_grid = volterra.make_grid(
            beta, params, config.grid_step, config.grid_cells
        )
        if initial is None:
            current = volterra.initial_iterate(beta, params, grid_step, n_grid)
        else:
            current = Profile.from_function(
                initial.as_y(params.m).evaluate,
                grid_step,
                n_grid,
                eta_star=initial.eta_star,
                represents="Y",
                m=params.m,
            )

        diagnostics = FixedPointDiagnostics(damping=config.damping)
        n_nodes = config.n_nodes
        for sweep in range(1, config.max_picard_iters + 1):
            # the node count only ever grows, so the iteration map settles
            if config.adaptive_quadrature:
                n_nodes = max(
                    n_nodes,
                    ekoperator.select_node_count(
                        current, params.alpha, config.n_nodes, config.max_nodes
                    ),
                )
            raw = volterra.apply_S(
                current,
                beta,
                params,
                n_nodes=n_nodes,
                adaptive=False,
                check_admissible=False,
            )
            if allow_gap:
                front = volterra.locate_front(raw, grid_step, beta, params)
            else:
                front = volterra.FrontLocation(
                    volterra.detect_eta_star(raw, grid_step, beta, params), 0.0
                )
            image = volterra.truncate(
                raw, grid_step, front.eta_star, params.m, config.clamp_tolerance
            )

            values = (
                1.0 - config.damping
            ) * current.values + config.damping * image.values
            values[image.grid >= front.eta_star] = 0.0
            update = float(np.max(np.abs(values - current.values)))
            current = Profile(grid_step, values, front.eta_star, "Y", params.m)

            diagnostics.iterations = sweep
            diagnostics.final_residual = update
            diagnostics.residual_history.append(update)
            diagnostics.eta_star_history.append(front.eta_star)
            diagnostics.front_gap = front.gap
            diagnostics.quadrature_nodes = n_nodes
            logger.debug(
                f"Picard sweep {sweep}: update {update:.3e}, "
                f"eta* = {front.eta_star:.12g}, gap = {front.gap:.3e}"
            )

            if update <= config.picard_tol:
                return current, diagnostics

        raise PicardConvergenceError(
            f"Picard iteration at beta = {beta} did not reach "
            f"{config.picard_tol} within {config.max_picard_iters} sweeps "
            f"(last update {diagnostics.final_residual:.3e}).",
            beta=beta,
            residual_history=diagnostics.residual_history,
            eta_star_history=diagnostics.eta_star_history,
        )

    def solve_pinned(
        self,
        params: ProblemParams,
        front: float,
        initial: Optional[Profile] = None,
    ) -> Tuple[Profile, float, float, FixedPointDiagnostics]:
        """Computes the fixed point whose trajectory vanishes at `front`.

        Instead of fixing beta, every sweep picks the slope that makes
        S_beta(Y) zero at the pinned front, and the iterate is truncated
        where the trajectory first reaches zero. Fronts short of the no-flux
        front give profiles with negative flux. Longer fronts reproduce the
        no-flux profile followed by zeros, with a flux that vanishes to
        rounding.

        Args:
            params: Problem parameters.
            front: Pinned front, the last node of the grid.
            initial: Optional starting iterate. Its support is stretched onto
                [0, front] before resampling. Defaults to the linear profile
                1 - eta / front.

        Returns:
            (Y profile, beta, flux, diagnostics). The profile carries the
            detected front, which lies at or before the pinned one.

        Raises:
            FreeBoundaryError if the front is not positive.
            PicardConvergenceError if the tolerance is not met within
                max_picard_iters sweeps.
        """
        config = self.config
        grid_step, n_grid = volterra.make_pinned_grid(
            front, config.grid_step, config.grid_cells
        )
        front = grid_step * (n_grid - 1)
        if initial is None:
            current = volterra.pinned_initial_iterate(params, grid_step, n_grid)
        else:
            source = initial.as_y(params.m)
            support = (
                source.eta_star if np.isfinite(source.eta_star) else source.grid_end
            )
            scale = support / front
            current = Profile.from_function(
                lambda eta: source.evaluate(eta * scale),
                grid_step,
                n_grid,
                eta_star=front,
                represents="Y",
                m=params.m,
            )

        diagnostics = FixedPointDiagnostics(
            damping=config.damping, pinned_front=front
        )
        n_nodes = config.n_nodes
        beta, front_flux = float("nan"), float("nan")
        for sweep in range(1, config.max_picard_iters + 1):
            if config.adaptive_quadrature:
                n_nodes = max(
                    n_nodes,
                    ekoperator.select_node_count(
                        current, params.alpha, config.n_nodes, config.max_nodes
                    ),
                )
            iu = ekoperator.ek_apply_grid(
                current, params.alpha, n_nodes=n_nodes, adaptive=False
            )
            beta, front_flux = volterra.pinned_slope(iu, grid_step, params)
            raw = volterra.volterra_image(iu, grid_step, beta, params)
            raw[-1] = 0.0
            eta_star = volterra.pinned_front(raw, grid_step)
            image = volterra.truncate(
                raw, grid_step, eta_star, params.m, config.clamp_tolerance
            )

            values = (
                1.0 - config.damping
            ) * current.values + config.damping * image.values
            values[image.grid >= eta_star] = 0.0
            update = float(np.max(np.abs(values - current.values)))
            current = Profile(grid_step, values, eta_star, "Y", params.m)

            diagnostics.iterations = sweep
            diagnostics.final_residual = update
            diagnostics.residual_history.append(update)
            diagnostics.eta_star_history.append(eta_star)
            diagnostics.quadrature_nodes = n_nodes
            logger.debug(
                f"Pinned sweep {sweep}: update {update:.3e}, "
                f"beta = {beta:.15g}, flux = {front_flux:.3e}, "
                f"eta* = {eta_star:.12g}"
            )

            if update <= config.picard_tol:
                return current, beta, front_flux, diagnostics

        raise PicardConvergenceError(
            f"Picard iteration pinned at front = {front} did not reach "
            f"{config.picard_tol} within {config.max_picard_iters} sweeps "
            f"(last update {diagnostics.final_residual:.3e}, "
            f"beta = {beta}).",
            beta=beta,
            residual_history=diagnostics.residual_history,
            eta_star_history=diagnostics.eta_star_history,
        )


def picard_solve(
    beta: float,
    params: ProblemParams,
    config: Optional[SolverConfig] = None,
    initial: Optional[Profile] = None,
    allow_gap: bool = False,
) -> Tuple[Profile, FixedPointDiagnostics]:
    """Functional entry point to PicardSolver.solve."""
    return PicardSolver(config).solve(
        params, beta, initial=initial, allow_gap=allow_gap
    )
