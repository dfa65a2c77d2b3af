"""
This file tests the Erdelyi-Kober operator in fracpme/tools/ekoperator.py.
"""
import unittest
import warnings

import numpy as np
from parameterized import parameterized
from scipy import integrate
from scipy import special as scipy_special

from fracpme.data import Profile
from fracpme.mixins import QuadratureWarning, SpecialFunctionDomainError
from fracpme.tools import ekoperator


def linear_profile(grid_step: float = 1.0 / 64, eta_star: float = 1.0) -> Profile:
    n_nodes = int(round(eta_star / grid_step)) + 5
    return Profile.from_function(
        lambda eta: 1.0 - eta / eta_star, grid_step, n_nodes, eta_star=eta_star
    )


def quadratic_profile(grid_step: float) -> Profile:
    n_nodes = int(round(1.0 / grid_step)) + 5
    return Profile.from_function(
        lambda eta: (1.0 - eta) ** 2, grid_step, n_nodes, eta_star=1.0
    )


class TestEKOperator(unittest.TestCase):
    @parameterized.expand([("quarter", 0.25), ("half", 0.5), ("three_quarters", 0.75)])
    def test_constant(self, _name, alpha):
        expected = 1.0 / scipy_special.gamma(2.0 - alpha)
        value = ekoperator.ek_apply(lambda x: np.ones_like(x), 0.7, alpha)
        self.assertAlmostEqual(value, expected, places=12)

        profile = Profile(0.1, np.ones(11))
        np.testing.assert_allclose(
            ekoperator.ek_apply_grid(profile, alpha, adaptive=False),
            expected,
            rtol=1e-13,
        )

    def test_zero(self):
        self.assertEqual(
            ekoperator.ek_apply(lambda x: np.zeros_like(x), 0.4, 0.5), 0.0
        )
        profile = linear_profile()
        self.assertEqual(ekoperator.ek_apply(profile, 1.0, 0.5), 0.0)
        self.assertEqual(ekoperator.ek_apply(profile, 1.02, 0.5), 0.0)

    @parameterized.expand(
        [
            (f"p{p}_alpha{alpha}", alpha, p)
            for alpha in (0.25, 0.5, 0.75)
            for p in (0.5, 1.0, 2.0)
        ]
    )
    def test_power_law(self, _name, alpha, p):
        eta = 0.8
        # B(1 - alpha p / 2, 1 - alpha) / Gamma(1 - alpha)
        expected = (
            eta ** p
            * scipy_special.gamma(1.0 - alpha * p / 2.0)
            / scipy_special.gamma(2.0 - alpha - alpha * p / 2.0)
        )
        value = ekoperator.ek_apply(lambda x: x ** p, eta, alpha)
        self.assertLessEqual(abs(value - expected), 1e-8 * expected)

    def test_grid_matches_pointwise(self):
        profile = quadratic_profile(1.0 / 32)
        grid_values = ekoperator.ek_apply_grid(
            profile, 0.5, n_nodes=64, adaptive=False
        )
        pointwise = np.array(
            [
                ekoperator.ek_apply(profile, eta, 0.5, n_nodes=64, adaptive=False)
                for eta in profile.grid
            ]
        )
        np.testing.assert_allclose(grid_values, pointwise, rtol=0, atol=1e-14)

    @parameterized.expand([("quarter", 0.25), ("three_quarters", 0.75)])
    def test_grid_matches_pointwise_with_defaults(self, _name, alpha):
        # sqrt(1 - eta) forces the adaptive selection past its start count
        profile = Profile.from_function(
            lambda eta: np.sqrt(np.clip(1.0 - eta, 0.0, None)),
            1.0 / 64,
            70,
            eta_star=1.0,
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", QuadratureWarning)
            grid_values = ekoperator.ek_apply_grid(profile, alpha)
            pointwise = np.array(
                [ekoperator.ek_apply(profile, eta, alpha) for eta in profile.grid]
            )
        np.testing.assert_allclose(grid_values, pointwise, rtol=0, atol=1e-14)

    @parameterized.expand([("near", 0.3), ("middle", 0.6), ("far", 0.9)])
    def test_truncated_support(self, _name, eta):
        alpha = 0.5
        s0 = eta ** (2.0 / alpha)
        integral, _ = integrate.quad(
            lambda s: 1.0 - eta * s ** (-alpha / 2.0),
            s0,
            1.0,
            weight="alg",
            wvar=(0.0, -alpha),
            epsabs=1e-14,
            epsrel=1e-14,
        )
        expected = integral / scipy_special.gamma(1.0 - alpha)
        value = ekoperator.ek_apply(linear_profile(), eta, alpha, n_nodes=256)
        self.assertAlmostEqual(value, expected, delta=1e-10)

    def test_second_order_in_grid_step(self):
        alpha, eta = 0.5, 0.5
        exact = ekoperator.ek_apply_function(
            lambda x: np.clip(1.0 - x, 0.0, None) ** 2,
            eta,
            alpha,
            support=1.0,
            n_nodes=256,
        )
        errors = [
            abs(
                ekoperator.ek_apply(
                    quadratic_profile(step), eta, alpha, n_nodes=512
                )
                - exact
            )
            for step in (1.0 / 16, 1.0 / 32, 1.0 / 64)
        ]
        self.assertGreaterEqual(errors[0] / errors[1], 3.5)
        self.assertGreaterEqual(errors[1] / errors[2], 3.5)

    def test_monotone_and_bounded(self):
        alpha = 0.5
        upper = ekoperator.ek_apply_grid(
            linear_profile(), alpha, n_nodes=128, adaptive=False
        )
        lower = ekoperator.ek_apply_grid(
            quadratic_profile(1.0 / 64), alpha, n_nodes=128, adaptive=False
        )
        self.assertTrue(np.all(lower <= upper + 1e-14))
        self.assertTrue(np.all(lower >= 0.0))
        self.assertTrue(
            np.all(upper <= 1.0 / scipy_special.gamma(2.0 - alpha) + 1e-14)
        )

    def test_linearity(self):
        first, second = linear_profile(), quadratic_profile(1.0 / 64)
        combined = Profile(
            first.grid_step,
            2.0 * first.values + 3.0 * second.values,
            eta_star=1.0,
        )
        apply = lambda p: ekoperator.ek_apply_grid(
            p, 0.5, n_nodes=64, adaptive=False
        )
        np.testing.assert_allclose(
            apply(combined),
            2.0 * apply(first) + 3.0 * apply(second),
            rtol=0,
            atol=1e-13,
        )

    def test_node_selection(self):
        constant = Profile(0.1, np.ones(11))
        with warnings.catch_warnings():
            warnings.simplefilter("error", QuadratureWarning)
            self.assertEqual(ekoperator.select_node_count(constant, 0.5), 32)

        selected = ekoperator.select_node_count(
            linear_profile(), 0.5, n_nodes=16, max_nodes=4096
        )
        self.assertIn(selected, [16 * 2 ** k for k in range(9)])

        with self.assertWarns(QuadratureWarning):
            ekoperator.select_node_count(
                linear_profile(), 0.5, n_nodes=8, max_nodes=8
            )

    def test_domain(self):
        with self.assertRaises(SpecialFunctionDomainError):
            ekoperator.ek_apply(linear_profile(), 0.5, 1.0)
        with self.assertRaises(SpecialFunctionDomainError):
            ekoperator.ek_apply(linear_profile(), -0.1, 0.5)
        with self.assertRaises(SpecialFunctionDomainError):
            ekoperator.ek_apply(lambda x: x, -0.1, 0.5)


if __name__ == "__main__":
    unittest.main()
