"""
Abstract class ProfileSolver, for the self-similar profile module.

All solvers are derived classes of this abstract class, and at a minimum
store a SolverConfig and implement a method called `solve`.
"""
import abc
from typing import Optional

from fracpme.data import ProblemParams
from fracpme.solver.SolverConfig import SolverConfig


class ProfileSolver(abc.ABC):
    """
    ProfileSolver is an abstract class that all profile solvers derive from.

    Args:
        config: Numerical settings. Defaults to SolverConfig().
    """

    def __init__(self, config: Optional[SolverConfig] = None):

        self.config = config if config is not None else SolverConfig()

    @abc.abstractmethod
    def solve(self, params: ProblemParams, *args, **kwargs):
        """Solves for a self-similar profile.

        Args:
            params: Problem parameters (alpha, m).
        """
        pass
