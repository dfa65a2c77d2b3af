"""This file contains general utilities for the time-domain oracle: the L1
weights of the fractional derivative and the diagnostics computed on a
simulated field."""
from typing import Tuple

import numpy as np

from fracpme.data import PdeField, Profile
from fracpme.mixins import PdeOracleError


def l1_weights(alpha: float, n: int) -> np.ndarray:
    """Convolution weights of the L1 discretization.

    The order-alpha derivative at level n is approximated by

        1 / (Gamma(2 - alpha) dt^alpha) sum_k b_k (u^(n-k) - u^(n-k-1)),

    with b_k = (k + 1)^(1 - alpha) - k^(1 - alpha). The scaling factor is
    left to the caller.

    Args:
        alpha: Order of the derivative, 0 < alpha < 1.
        n: Number of weights.

    Returns:
        The weights b_0, ..., b_(n-1). b_0 = 1 and the sequence is strictly
        decreasing.
    """
    if not 0 < alpha < 1:
        raise PdeOracleError(f"alpha must lie in (0, 1), got {alpha}.")
    if n < 1:
        raise PdeOracleError(f"Need at least one weight, got {n}.")
    k = np.arange(n, dtype=float)
    return (k + 1.0) ** (1.0 - alpha) - k ** (1.0 - alpha)


def front_positions(field: PdeField, threshold: float = 1e-3) -> np.ndarray:
    """Wetting-front position at every time level.

    The front is the first point where u drops below `threshold`, linearly
    interpolated between the neighbouring nodes.
    """
    positions = np.zeros(field.nt + 1)
    x = field.x
    for level in range(1, field.nt + 1):
        row = field.u[level]
        below = np.flatnonzero(row < threshold)
        if below.size == 0:
            positions[level] = x[-1]
            continue
        j = int(below[0])
        if j == 0:
            continue
        a, b = row[j - 1], row[j]
        positions[level] = x[j - 1] + field.dx * (a - threshold) / (a - b)
    return positions


def front_exponent(
    field: PdeField,
    threshold: float = 1e-3,
    window: Tuple[float, float] = (0.1, 1.0),
) -> float:
    """Log-log slope of the front trajectory over a window of late times.

    Args:
        field: Simulated field.
        threshold: Front threshold, see front_positions.
        window: Fractions of the final time delimiting the fit.

    Returns:
        The fitted exponent of x_f(t) ~ t^p.
    """
    t = field.t
    positions = front_positions(field, threshold)
    final = t[-1]
    mask = (t >= window[0] * final) & (t <= window[1] * final) & (positions > 0)
    if np.count_nonzero(mask) < 2:
        raise PdeOracleError("Not enough front positions to fit an exponent.")
    slope, _ = np.polyfit(np.log(t[mask]), np.log(positions[mask]), 1)
    return float(slope)


def compare_self_similar(
    field: PdeField, profile: Profile, levels: int = 3
) -> float:
    """Sup-distance between the field and the self-similar solution.

    Compares u(x, t) with U(x t^(-alpha/2)) at the latest `levels` time
    levels and returns the largest of the sup-norm distances.
    """
    u_profile = profile.as_u()
    x = field.x
    distances = []
    for level in range(max(field.nt - levels + 1, 1), field.nt + 1):
        t = level * field.dt
        similar = u_profile.evaluate(x * t ** (-field.alpha / 2.0))
        distances.append(float(np.max(np.abs(field.u[level] - similar))))
    return max(distances)
