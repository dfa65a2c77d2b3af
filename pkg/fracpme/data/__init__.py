"""Top level for data types."""

from .PdeField import PdeField
from .ProblemParams import ProblemParams
from .Profile import Profile
from .results import BoundsReport, FixedPointDiagnostics, ShootingResult
