class FracPMEError(Exception):
    """A general exception for the fracpme software."""

    pass


class ParameterError(FracPMEError):
    """An Exception class for invalid problem or solver parameters."""

    pass


class SpecialFunctionDomainError(FracPMEError):
    """An Exception class for special functions and quadrature rules
    evaluated outside of their domain."""

    pass


class BoundsDomainError(FracPMEError):
    """An Exception for closed-form bounds requested below beta0."""

    pass


class FreeBoundaryError(FracPMEError):
    """An Exception for a trajectory without a detectable zero."""

    pass


class PicardConvergenceError(FracPMEError):
    """An Exception class for Picard iterations that did not converge.

    Args:
        message: Human-readable description.
        beta: The shooting slope the iteration was run at.
        residual_history: Sup-norm change of every sweep.
        eta_star_history: Detected free boundary of every sweep.
    """

    def __init__(
        self,
        message: str,
        beta: float = float("nan"),
        residual_history=None,
        eta_star_history=None,
    ):
        super().__init__(message)
        self.beta = beta
        self.residual_history = list(residual_history or [])
        self.eta_star_history = list(eta_star_history or [])


class ShootingBracketError(FracPMEError):
    """An Exception class for the ShootingSolver bracket search."""

    pass


class PdeOracleError(FracPMEError):
    """An Exception for instabilities of the time-domain oracle."""

    pass


class ConfigError(FracPMEError):
    """An Exception listing every violated configuration constraint."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "Invalid configuration:\n  - " + "\n  - ".join(self.violations)
        )


class UnspecifiedConfigParameterError(ConfigError):
    """A ConfigError raised when a config key is unknown or left empty."""

    pass
