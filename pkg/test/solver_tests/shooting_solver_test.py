"""
This file tests the ShootingSolver, which searches for the slope beta* of the
no-flux profile.
"""
import unittest
import warnings

import numpy as np
import pytest
from parameterized import parameterized

from fracpme.data import ProblemParams
from fracpme.mixins import ShootingBracketError
from fracpme.solver import (
    PicardSolver,
    ShootingSolver,
    SolverConfig,
    flux,
    front_residual,
    moment_identity_residual,
    shoot,
    shooting_residual,
)
from fracpme.tools import bounds


class TestShootingResidual(unittest.TestCase):
    def setUp(self):
        self.params = ProblemParams(0.5, 2.0)
        self.beta0 = bounds.beta0(self.params)
        self.config = SolverConfig(
            grid_cells=128, n_nodes=64, adaptive_quadrature=False
        )

    def test_residual_is_flux_for_large_slopes(self):
        beta = 2.0 * self.beta0
        residual, profile, diagnostics = shooting_residual(
            beta, self.params, self.config
        )
        self.assertEqual(diagnostics.front_gap, 0.0)
        self.assertEqual(residual, flux(profile, beta, self.params, 64))
        self.assertLess(residual, 0.0)

    def test_residual_decreases_with_slope(self):
        residuals = [
            shooting_residual(factor * self.beta0, self.params, self.config)[0]
            for factor in (1.5, 2.0, 3.0)
        ]
        self.assertTrue(np.all(np.diff(residuals) < 0))

    def test_front_residual_of_short_front(self):
        profile, _ = PicardSolver(self.config).solve(
            self.params, 2.0 * self.beta0
        )
        evaluation = front_residual(profile.eta_star, self.params, self.config)
        self.assertEqual(evaluation.front, profile.eta_star)
        self.assertLess(evaluation.flux, -1e-3)
        self.assertAlmostEqual(evaluation.padding, 0.0, delta=1e-9)
        self.assertAlmostEqual(
            evaluation.beta, 2.0 * self.beta0, delta=2e-3 * self.beta0
        )
        self.assertEqual(
            evaluation.diagnostics.iterations,
            len(evaluation.diagnostics.residual_history),
        )

    def test_unknown_method(self):
        with self.assertRaises(ShootingBracketError):
            ShootingSolver(self.config, method="newton")

    def test_fresh_solver_has_no_params(self):
        self.assertIsNone(ShootingSolver(self.config).params)


class TestShootingSolver(unittest.TestCase):
    def setUp(self):
        self.params = ProblemParams(0.5, 2.0)
        self.config = SolverConfig(grid_cells=128)

    @pytest.mark.slow
    def test_no_flux_solution(self):
        result = shoot(self.params, self.config)
        self.assertTrue(result.converged)
        self.assertLessEqual(abs(result.flux_residual), 1e-8)
        self.assertGreater(result.beta_star, 0.0)
        self.assertEqual(result.below_beta0, result.beta_star < result.beta0)
        self.assertEqual(result.profile.represents, "U")
        self.assertEqual(result.profile.membership_violations(1e-10), [])
        self.assertTrue(result.profile.is_nonincreasing(1e-10))
        self.assertGreater(result.eta_star, 0.0)
        self.assertLessEqual(
            bounds.f_minus(result.beta_star, self.params), 1e-6
        )
        self.assertEqual(
            len(result.picard_diagnostics), len(result.evaluations)
        )
        self.assertLess(
            moment_identity_residual(result.profile, self.params), 1e-3
        )

        # the returned front lies within a cell of the profile's support
        h = result.profile.grid_step
        self.assertLessEqual(abs(result.eta_star - result.profile.eta_star), h)

        lo, hi = result.bracket_history[-1]
        self.assertLessEqual(lo, result.beta_star)
        self.assertLessEqual(result.beta_star, hi)

    @parameterized.expand(
        [
            (f"alpha{alpha}_m{m}", alpha, m)
            for alpha in (0.25, 0.5, 0.75)
            for m in (1.5, 2.0, 3.0)
        ]
    )
    @pytest.mark.slow
    def test_sweep_grid(self, _name, alpha, m):
        params = ProblemParams(alpha, m)
        result = shoot(params, self.config, shoot_tol=1e-8)
        self.assertTrue(result.converged)
        self.assertLessEqual(abs(result.flux_residual), 1e-8)

        beta, h = result.beta_star, result.profile.grid_step
        self.assertLessEqual(bounds.f_minus(beta, params), 1e-6)
        self.assertGreaterEqual(result.eta_star, bounds.eta2(beta, params) - h)
        if beta >= result.beta0:
            self.assertLessEqual(result.eta_star, bounds.eta1(beta, params) + h)
            self.assertGreaterEqual(bounds.f_plus(beta, params), -1e-6)

    @pytest.mark.slow
    def test_deterministic(self):
        first = shoot(self.params, self.config)
        second = shoot(self.params, self.config)
        self.assertEqual(first.beta_star, second.beta_star)
        self.assertEqual(first.eta_star, second.eta_star)
        np.testing.assert_array_equal(
            first.profile.values, second.profile.values
        )
        self.assertEqual(first.evaluations, second.evaluations)

    @pytest.mark.slow
    def test_secant_agrees_with_bisection(self):
        bisection = shoot(self.params, self.config)
        secant = shoot(self.params, self.config, method="secant")
        self.assertTrue(secant.converged)
        self.assertAlmostEqual(
            secant.beta_star, bisection.beta_star, delta=1e-4
        )

    @pytest.mark.slow
    def test_without_extension_below_beta0(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = ShootingSolver(
                self.config, extend_below_beta0=False
            ).solve(self.params)
        if result.degenerate:
            self.assertEqual(result.beta_star, result.beta0)
            self.assertEqual(result.evaluations[-1][0], result.beta0)
            self.assertLess(result.flux_residual, 0.0)
        else:
            self.assertGreaterEqual(result.beta_star, result.beta0)

    @pytest.mark.slow
    def test_scan_reports_transition(self):
        result = shoot(self.params, self.config, scan_points=5)
        self.assertGreaterEqual(len(result.roots), 1)
        for lo, hi in result.roots:
            self.assertLessEqual(lo, hi)
        lo, hi = result.roots[0]
        # scan fronts sit on other grids than the final one
        self.assertLessEqual(lo - 1e-4, result.beta_star)
        self.assertLessEqual(result.beta_star, hi + 1e-4)


if __name__ == "__main__":
    unittest.main()
