class MembershipWarning(UserWarning):
    """A Warning for operator images clamped back into [0, 1]."""

    pass


class QuadratureWarning(UserWarning):
    pass


class ShootingWarning(UserWarning):
    """A warning class for the ShootingSolver."""

    pass


class PdeOracleWarning(UserWarning):
    pass
