"""
This file tests the Volterra operators and free-boundary routines in
fracpme/solver/volterra.py.
"""
import unittest

import numpy as np
from parameterized import parameterized
from scipy import special as scipy_special

from fracpme.data import ProblemParams, Profile
from fracpme.mixins import BoundsDomainError, FreeBoundaryError, MembershipWarning
from fracpme.solver import volterra
from fracpme.tools import bounds


def random_monotone_profile(
    seed: int, grid_step: float, n_nodes: int, eta_support: float
) -> Profile:
    rng = np.random.default_rng(seed)
    grid = grid_step * np.arange(n_nodes)
    inside = grid < eta_support
    values = np.zeros(n_nodes)
    values[inside] = np.sort(rng.uniform(0.0, 1.0, np.count_nonzero(inside)))[
        ::-1
    ]
    values[0] = 1.0
    return Profile(grid_step, values, eta_star=eta_support)


class TestVolterra(unittest.TestCase):
    def setUp(self):
        self.params = ProblemParams(0.5, 2.0)
        self.beta0 = bounds.beta0(self.params)
        self.beta = 1.5 * self.beta0
        self.grid_step, self.n_nodes = volterra.make_grid(
            self.beta, self.params, grid_cells=128
        )

    def test_make_grid(self):
        eta1 = bounds.eta1(self.beta, self.params)
        self.assertAlmostEqual(self.grid_step, eta1 / 128)
        self.assertEqual(self.n_nodes, 128 + 4 + 1)

        step, n_nodes = volterra.make_grid(
            0.5 * self.beta0, self.params, grid_cells=128
        )
        reference = bounds.eta1(self.beta0, self.params)
        self.assertAlmostEqual(step, reference / 128)
        self.assertEqual(n_nodes, 256 + 4 + 1)

        step, n_nodes = volterra.make_grid(self.beta, self.params, grid_step=0.01)
        self.assertEqual(step, 0.01)
        self.assertGreaterEqual((n_nodes - 1) * step, eta1 + 4 * step - 1e-9)

    def test_is_admissible(self):
        self.assertTrue(volterra.is_admissible(self.beta0, self.params))
        self.assertTrue(volterra.is_admissible(2 * self.beta0, self.params))
        self.assertFalse(volterra.is_admissible(0.99 * self.beta0, self.params))

    def test_image_at_origin(self):
        Y = volterra.initial_iterate(
            self.beta, self.params, self.grid_step, self.n_nodes
        )
        raw = volterra.apply_S(Y, self.beta, self.params)
        self.assertEqual(raw[0], 1.0)

    def test_constant_profile(self):
        alpha, m = self.params.alpha, self.params.m
        Y = Profile(self.grid_step, np.ones(self.n_nodes), represents="Y", m=m)
        raw = volterra.apply_S(Y, self.beta, self.params)
        eta = Y.grid
        # I 1 = 1 / Gamma(2 - alpha), so the outer integral is a polynomial
        expected = 1.0 + (m + 1) * (
            -self.beta * eta
            + (1.0 - alpha) * eta ** 2 / (2.0 * scipy_special.gamma(2.0 - alpha))
        )
        np.testing.assert_allclose(raw, expected, rtol=0, atol=1e-12)

    @parameterized.expand([("beta0", 1.0), ("middle", 1.5), ("large", 2.0)])
    def test_image_between_envelopes(self, _name, factor):
        beta = factor * self.beta0
        grid_step, n_nodes = volterra.make_grid(beta, self.params, grid_cells=128)
        eta1 = bounds.eta1(beta, self.params)
        for seed in range(50):
            support = (0.2 + 0.016 * seed) * eta1
            profile = random_monotone_profile(seed, grid_step, n_nodes, support)
            raw = volterra.apply_S(profile, beta, self.params, n_nodes=64)
            grid = profile.grid
            with self.subTest(seed=seed):
                self.assertLessEqual(
                    np.max(raw - bounds.g1(grid, beta, self.params)), 1e-8
                )
                self.assertGreaterEqual(
                    np.min(raw - bounds.g2(grid, beta, self.params)), -1e-8
                )

    def test_apply_S_below_beta0(self):
        Y = volterra.initial_iterate(
            self.beta, self.params, self.grid_step, self.n_nodes
        )
        with self.assertRaises(BoundsDomainError):
            volterra.apply_S(Y, 0.5 * self.beta0, self.params)
        raw = volterra.apply_S(
            Y, 0.5 * self.beta0, self.params, check_admissible=False
        )
        self.assertEqual(raw.shape, (self.n_nodes,))

    @parameterized.expand([("upper", bounds.g1, bounds.eta1), ("lower", bounds.g2, bounds.eta2)])
    def test_detect_envelope_roots(self, _name, envelope, root):
        grid = self.grid_step * np.arange(self.n_nodes)
        raw = envelope(grid, self.beta, self.params)
        eta_star = volterra.detect_eta_star(
            raw, self.grid_step, self.beta, self.params
        )
        self.assertAlmostEqual(eta_star, root(self.beta, self.params), delta=1e-5)

    def test_detect_failures(self):
        with self.assertRaises(FreeBoundaryError):
            volterra.detect_eta_star(
                np.ones(10), self.grid_step, self.beta, self.params
            )

        # a crossing far beyond eta1 is rejected for admissible slopes
        eta1 = bounds.eta1(self.beta, self.params)
        grid = self.grid_step * np.arange(3 * self.n_nodes)
        raw = 1.0 - grid / (2.0 * eta1)
        with self.assertRaises(FreeBoundaryError):
            volterra.detect_eta_star(raw, self.grid_step, self.beta, self.params)
        eta_star = volterra.detect_eta_star(
            raw, self.grid_step, self.beta, self.params, check_bracket=False
        )
        self.assertAlmostEqual(eta_star, 2.0 * eta1, delta=1e-12)

    def test_locate_front(self):
        front = volterra.locate_front(
            np.array([1.0, 0.5, 0.3, 0.4]), 0.1, 0.5 * self.beta0, self.params
        )
        self.assertAlmostEqual(front.eta_star, 0.2)
        self.assertEqual(front.gap, 0.3)

        front = volterra.locate_front(
            np.array([1.0, 0.5, -0.5, 0.4]), 0.1, self.beta, self.params
        )
        self.assertAlmostEqual(front.eta_star, 0.15)
        self.assertEqual(front.gap, 0.0)

    def test_locate_front_ignores_later_minima(self):
        # a nearly flat tail dipping below the first minimum
        raw = np.array([1.0, 0.5, 0.3, 0.31, 0.2, 0.25, 0.1])
        front = volterra.locate_front(raw, 0.1, 0.5 * self.beta0, self.params)
        self.assertAlmostEqual(front.eta_star, 0.2)
        self.assertEqual(front.gap, 0.3)

        front = volterra.locate_front(
            np.array([1.0, 0.8, 0.6, 0.4]), 0.1, 0.5 * self.beta0, self.params
        )
        self.assertAlmostEqual(front.eta_star, 0.3)
        self.assertEqual(front.gap, 0.4)

    def test_make_pinned_grid(self):
        step, n_nodes = volterra.make_pinned_grid(1.2, grid_cells=128)
        self.assertAlmostEqual(step, 1.2 / 128)
        self.assertEqual(n_nodes, 129)

        step, n_nodes = volterra.make_pinned_grid(1.2, grid_step=0.25)
        self.assertEqual(n_nodes, 9)
        self.assertLessEqual(step, 0.25)
        self.assertAlmostEqual(step * (n_nodes - 1), 1.2)

        with self.assertRaises(FreeBoundaryError):
            volterra.make_pinned_grid(-1.0)

    @parameterized.expand([("seed0", 0), ("seed1", 1), ("seed2", 2)])
    def test_pinned_slope_zeroes_last_node(self, _name, seed):
        rng = np.random.default_rng(seed)
        grid_step = 0.01
        iu = np.sort(rng.uniform(0.0, 1.0, 101))[::-1]
        beta, front_flux = volterra.pinned_slope(iu, grid_step, self.params)
        raw = volterra.volterra_image(iu, grid_step, beta, self.params)
        self.assertAlmostEqual(raw[0], 1.0)
        self.assertAlmostEqual(raw[-1], 0.0, delta=1e-12)

        # the flux is -beta + (1 - alpha/2) int I U
        first = volterra.integrate_to_front(iu, grid_step, 1.0)
        self.assertAlmostEqual(
            front_flux,
            -beta + (1.0 - self.params.alpha / 2.0) * first,
            delta=1e-12,
        )

    def test_pinned_front(self):
        raw = np.array([1.0, 0.6, 0.2, 0.0])
        self.assertAlmostEqual(volterra.pinned_front(raw, 0.1), 0.3, delta=1e-12)

        # rounding noise after an earlier touch does not carry the front on
        raw = np.array([1.0, 0.4, 1e-14, 3e-15, 0.0])
        self.assertLess(volterra.pinned_front(raw, 0.1), 0.2 + 1e-12)

    @parameterized.expand([("m1.5", 1.5), ("m2", 2.0), ("m3", 3.0)])
    def test_extrapolate_front(self, _name, m):
        eta_star, grid_step = 0.9537, 0.01
        pressure = lambda eta: np.clip(0.7 * (eta_star - eta), 0.0, None)
        # the detected front of a no-flux profile trails into the next cell
        Y = Profile.from_function(
            lambda eta: pressure(eta) ** ((m + 1) / m),
            grid_step,
            120,
            eta_star=0.96,
            represents="Y",
            m=m,
        )
        self.assertAlmostEqual(
            volterra.extrapolate_front(Y, m), eta_star, delta=1e-12
        )

        linear = Profile.from_function(
            lambda eta: 1.0 - eta, grid_step, 120, eta_star=1.0, represents="Y", m=m
        )
        front = volterra.extrapolate_front(linear, m)
        self.assertGreaterEqual(front, 0.99 - 1e-12)
        self.assertLessEqual(front, 1.0 + 1e-12)

    def test_truncate(self):
        raw = np.array([1.0, 0.6, 0.2, -0.2, -0.5])
        Y = volterra.truncate(raw, 0.1, 0.25, 2.0)
        np.testing.assert_allclose(Y.values, [1.0, 0.6, 0.2, 0.0, 0.0])
        self.assertEqual(Y.represents, "Y")
        self.assertEqual(Y.eta_star, 0.25)

        with self.assertWarns(MembershipWarning):
            Y = volterra.truncate(
                np.array([1.0, 1.1, 0.2, -0.2]), 0.1, 0.25, 2.0
            )
        np.testing.assert_allclose(Y.values, [1.0, 1.0, 0.2, 0.0])

    def test_apply_A(self):
        Y = volterra.initial_iterate(
            self.beta, self.params, self.grid_step, self.n_nodes
        )
        image = volterra.apply_A(Y, self.beta, self.params)
        self.assertEqual(image.membership_violations(), [])
        self.assertGreaterEqual(
            image.eta_star, bounds.eta2(self.beta, self.params) - self.grid_step
        )
        self.assertLessEqual(
            image.eta_star, bounds.eta1(self.beta, self.params) + self.grid_step
        )

    def test_integrate_to_front(self):
        values = 0.1 * np.arange(11)
        self.assertAlmostEqual(
            volterra.integrate_to_front(np.ones(11), 0.1, 0.55), 0.55
        )
        self.assertAlmostEqual(
            volterra.integrate_to_front(values, 0.1, 0.55), 0.55 ** 2 / 2
        )
        self.assertAlmostEqual(
            volterra.integrate_to_front(values, 0.1, 0.6), 0.18
        )


if __name__ == "__main__":
    unittest.main()
