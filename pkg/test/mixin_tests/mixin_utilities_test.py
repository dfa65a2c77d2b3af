"""
This file tests the utilities stored in fracpme/mixins.
"""
import logging
import os
import unittest
from unittest import mock

from fracpme.mixins import (
    ConfigError,
    PicardConvergenceError,
    logger,
    set_level_from_env,
    utilities,
)


class TestMixinUtilities(unittest.TestCase):
    def test_log_runtime_returns_value(self):
        @utilities.log_runtime
        def add(a, b):
            return a + b

        self.assertEqual(add(1, 2), 3)
        self.assertEqual(add.__name__, "add")

    def test_log_kwargs_passes_through(self):
        @utilities.log_kwargs
        def scale(x, factor=2):
            return x * factor

        self.assertEqual(scale(3, factor=4), 12)

    def test_config_error_lists_every_violation(self):
        error = ConfigError(["first problem", "second problem"])
        self.assertEqual(error.violations, ["first problem", "second problem"])
        self.assertIn("first problem", str(error))
        self.assertIn("second problem", str(error))

    def test_picard_error_carries_history(self):
        error = PicardConvergenceError(
            "stalled", beta=0.5, residual_history=[1.0, 0.5]
        )
        self.assertEqual(error.beta, 0.5)
        self.assertEqual(error.residual_history, [1.0, 0.5])
        self.assertEqual(error.eta_star_history, [])

    def test_set_level_from_env(self):
        with mock.patch.object(logger, "setLevel") as set_level:
            with mock.patch.dict(os.environ, {"FRACPME_LOG": "debug"}):
                set_level_from_env()
            set_level.assert_called_once_with(logging.DEBUG)

            with mock.patch.dict(os.environ, {"FRACPME_LOG": "loud"}):
                with self.assertRaises(ValueError):
                    set_level_from_env()
            self.assertEqual(set_level.call_count, 1)


if __name__ == "__main__":
    unittest.main()
