"""
This file tests the PicardSolver and the solution checks applied to its
fixed points.
"""
import unittest

import numpy as np

from fracpme.data import ProblemParams, Profile
from fracpme.mixins import (
    BoundsDomainError,
    FreeBoundaryError,
    ParameterError,
    PicardConvergenceError,
)
from fracpme.solver import (
    PicardSolver,
    SolverConfig,
    flux,
    moment_identity_residual,
    picard_solve,
    residual_eq2,
    volterra,
)
from fracpme.tools import bounds


class TestPicardSolver(unittest.TestCase):
    def setUp(self):
        self.params = ProblemParams(0.5, 2.0)
        self.beta = 2.0 * bounds.beta0(self.params)
        self.config = SolverConfig(
            grid_cells=128, n_nodes=64, adaptive_quadrature=False
        )
        self.solver = PicardSolver(self.config)
        self.profile, self.diagnostics = self.solver.solve(
            self.params, self.beta
        )

    def test_converges(self):
        self.assertLessEqual(
            self.diagnostics.final_residual, self.config.picard_tol
        )
        self.assertEqual(
            len(self.diagnostics.residual_history), self.diagnostics.iterations
        )
        self.assertEqual(self.diagnostics.front_gap, 0.0)
        self.assertEqual(self.diagnostics.quadrature_nodes, 64)
        self.assertEqual(self.profile.represents, "Y")

    def test_fixed_point_is_in_M(self):
        u = self.profile.as_u()
        self.assertEqual(u.membership_violations(), [])
        self.assertTrue(u.is_nonincreasing(1e-12))

        h = self.profile.grid_step
        self.assertGreaterEqual(
            self.profile.eta_star, bounds.eta2(self.beta, self.params) - h
        )
        self.assertLessEqual(
            self.profile.eta_star, bounds.eta1(self.beta, self.params) + h
        )

    def test_idempotent(self):
        profile, diagnostics = self.solver.solve(
            self.params, self.beta, initial=self.profile
        )
        self.assertLessEqual(diagnostics.iterations, 2)
        np.testing.assert_allclose(
            profile.values, self.profile.values, rtol=0, atol=1e-9
        )

    def test_functional_entry_point(self):
        profile, diagnostics = picard_solve(self.beta, self.params, self.config)
        np.testing.assert_array_equal(profile.values, self.profile.values)
        self.assertEqual(diagnostics.iterations, self.diagnostics.iterations)

    def test_flux_and_moment_identity(self):
        front_flux = flux(self.profile, self.beta, self.params, n_nodes=64)
        self.assertLessEqual(front_flux, 1e-8)
        self.assertLessEqual(
            front_flux, bounds.f_plus(self.beta, self.params) + 1e-6
        )
        # f_minus relies on I U >= U / Gamma(2 - alpha), which decreasing
        # profiles reverse, so away from beta* the flux drops below it
        self.assertLess(front_flux, bounds.f_minus(self.beta, self.params))

        # int z I U = 1 / (m + 1) + eta* flux away from the no-flux slope
        defect = moment_identity_residual(self.profile, self.params)
        self.assertAlmostEqual(
            defect, abs(self.profile.eta_star * front_flux), delta=5e-4
        )

    def test_differential_residual(self):
        residual = residual_eq2(self.profile, self.beta, self.params)
        self.assertTrue(np.isfinite(residual))
        self.assertGreaterEqual(residual, 0.0)
        self.assertEqual(
            residual_eq2(self.profile, self.beta, self.params, threshold=1.0),
            0.0,
        )

    def test_differential_residual_detects_bump(self):
        residual = residual_eq2(self.profile, self.beta, self.params)

        eta_star = self.profile.eta_star
        left, right = 0.3 * eta_star, 0.7 * eta_star
        grid = self.profile.grid
        inside = (grid > left) & (grid < right)
        bump = np.zeros_like(grid)
        phase = np.pi * (grid[inside] - left) / (right - left)
        bump[inside] = 0.1 * np.sin(phase) ** 2
        bumped = Profile(
            self.profile.grid_step,
            self.profile.values + bump,
            eta_star,
            "Y",
            self.params.m,
        )
        bumped_residual = residual_eq2(bumped, self.beta, self.params)
        self.assertGreater(bumped_residual, 100.0 * residual)
        self.assertGreater(bumped_residual, 1.0)

    def test_below_beta0(self):
        beta = 0.5 * bounds.beta0(self.params)
        with self.assertRaises(BoundsDomainError):
            self.solver.solve(self.params, beta)

        profile, diagnostics = self.solver.solve(
            self.params, beta, allow_gap=True
        )
        self.assertGreaterEqual(diagnostics.front_gap, 0.0)
        self.assertEqual(profile.as_u().membership_violations(), [])

    def test_iteration_limit(self):
        solver = PicardSolver(
            SolverConfig(grid_cells=128, picard_tol=1e-15, max_picard_iters=2)
        )
        with self.assertRaises(PicardConvergenceError) as context:
            solver.solve(self.params, self.beta)
        self.assertEqual(context.exception.beta, self.beta)
        self.assertEqual(len(context.exception.residual_history), 2)
        self.assertEqual(len(context.exception.eta_star_history), 2)

    def test_damped_iteration_agrees(self):
        solver = PicardSolver(
            SolverConfig(
                grid_cells=128, n_nodes=64, adaptive_quadrature=False, damping=0.5
            )
        )
        profile, diagnostics = solver.solve(self.params, self.beta)
        self.assertEqual(diagnostics.damping, 0.5)
        self.assertAlmostEqual(
            profile.eta_star, self.profile.eta_star, delta=1e-8
        )


class TestPinnedPicard(unittest.TestCase):
    def setUp(self):
        self.params = ProblemParams(0.5, 2.0)
        self.beta = 2.0 * bounds.beta0(self.params)
        self.config = SolverConfig(
            grid_cells=128, n_nodes=64, adaptive_quadrature=False
        )
        self.solver = PicardSolver(self.config)
        self.profile, _ = self.solver.solve(self.params, self.beta)

    def test_pinned_front_recovers_slope(self):
        front = self.profile.eta_star
        profile, beta, front_flux, diagnostics = self.solver.solve_pinned(
            self.params, front
        )
        self.assertLessEqual(diagnostics.final_residual, self.config.picard_tol)
        self.assertAlmostEqual(diagnostics.pinned_front, front, places=12)
        self.assertAlmostEqual(profile.grid_end, front, places=12)
        self.assertAlmostEqual(beta, self.beta, delta=2e-3 * self.beta)
        self.assertAlmostEqual(profile.eta_star, front, delta=1e-9)
        self.assertLess(front_flux, 0.0)
        self.assertAlmostEqual(
            front_flux,
            flux(self.profile, self.beta, self.params, n_nodes=64),
            delta=1e-2,
        )
        u = profile.as_u()
        self.assertEqual(u.membership_violations(1e-12), [])
        self.assertTrue(u.is_nonincreasing(1e-12))

    def test_seeded_solve_is_fast(self):
        front = self.profile.eta_star
        _, beta, _, cold = self.solver.solve_pinned(self.params, front)
        seed, _, _, _ = self.solver.solve_pinned(self.params, 0.9 * front)
        _, seeded_beta, _, warm = self.solver.solve_pinned(
            self.params, front, initial=seed
        )
        self.assertAlmostEqual(seeded_beta, beta, delta=1e-8)
        self.assertLess(warm.iterations, cold.iterations)

    def test_longer_front_means_smaller_slope(self):
        front = self.profile.eta_star
        results = [
            self.solver.solve_pinned(self.params, factor * front)
            for factor in (0.8, 1.0)
        ]
        self.assertGreater(results[0][1], results[1][1])
        self.assertLess(results[0][2], results[1][2])

    def test_iteration_limit(self):
        solver = PicardSolver(
            SolverConfig(grid_cells=128, picard_tol=1e-15, max_picard_iters=2)
        )
        with self.assertRaises(PicardConvergenceError) as context:
            solver.solve_pinned(self.params, self.profile.eta_star)
        self.assertEqual(len(context.exception.residual_history), 2)

    def test_front_must_be_positive(self):
        with self.assertRaises(FreeBoundaryError):
            self.solver.solve_pinned(self.params, 0.0)


class TestSolverConfig(unittest.TestCase):
    def test_defaults(self):
        config = SolverConfig()
        self.assertIsNone(config.grid_step)
        self.assertEqual(config.grid_cells, 1024)
        self.assertEqual(config.violations(), [])

    def test_every_violation_is_reported(self):
        with self.assertRaises(ParameterError) as context:
            SolverConfig(picard_tol=0.0, damping=1.5, n_nodes=1)
        message = str(context.exception)
        self.assertIn("picard_tol", message)
        self.assertIn("damping", message)
        self.assertIn("n_nodes", message)


if __name__ == "__main__":
    unittest.main()
