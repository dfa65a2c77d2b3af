"""Top level for the self-similar profile solvers."""

from . import volterra
from .PicardSolver import PicardSolver, picard_solve
from .ProfileSolver import ProfileSolver
from .ShootingSolver import (
    FrontEvaluation,
    ShootingSolver,
    flux,
    front_residual,
    shoot,
    shooting_residual,
)
from .SolverConfig import SolverConfig
from .volterra import (
    apply_A,
    apply_S,
    detect_eta_star,
    extrapolate_front,
    locate_front,
    moment_identity_residual,
    residual_eq2,
)
