"""
This file stores the PdeField class, the space-time solution of the
time-fractional porous medium equation produced by a FieldSimulator.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
import pandas as pd
from scipy import integrate


@dataclass
class PdeField:
    """Space-time field u(x, t) on a uniform rectangular mesh.

    Row n of `u` holds the time level t = n * dt and column j the point
    x = j * dx. Row 0 is the initial state. The whole history is kept since
    the fractional time derivative needs it.

    Args:
        dx: Spatial step.
        dt: Time step.
        nx: Number of spatial intervals (nx + 1 points).
        nt: Number of time steps (nt + 1 levels).
        u: Array of shape (nt + 1, nx + 1).
        alpha: Order of the time derivative.
        m: Nonlinearity exponent.
        clipped: Time levels at which values were clipped back into [0, 1].
    """

    dx: float
    dt: float
    nx: int
    nt: int
    u: np.ndarray
    alpha: float
    m: float
    clipped: List[int] = field(default_factory=list)

    @classmethod
    def empty(
        cls, dx: float, dt: float, nx: int, nt: int, alpha: float, m: float
    ) -> "PdeField":
        """A field holding the initial-boundary data and no solved levels."""
        u = np.zeros((nt + 1, nx + 1))
        u[:, 0] = 1.0
        return cls(dx, dt, nx, nt, u, alpha, m)

    @property
    def x(self) -> np.ndarray:
        return self.dx * np.arange(self.nx + 1)

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.nt + 1)

    @property
    def mass(self) -> np.ndarray:
        """Integral of u over the domain at every time level."""
        return integrate.trapezoid(self.u, dx=self.dx, axis=1)

    def to_dataframe(self, every: int = 1) -> pd.DataFrame:
        """Long-format table with columns t, x, u.

        Args:
            every: Keep every `every`-th time level.
        """
        levels = np.arange(0, self.nt + 1, every)
        t, x = np.meshgrid(self.t[levels], self.x, indexing="ij")
        return pd.DataFrame(
            {
                "t": t.ravel(),
                "x": x.ravel(),
                "u": self.u[levels].ravel(),
            }
        )
