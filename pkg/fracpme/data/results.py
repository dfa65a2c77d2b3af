"""
Result records returned by the bounds, Picard and shooting routines.
"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .Profile import Profile


@dataclass(frozen=True)
class BoundsReport:
    """All closed-form quantities evaluated at one shooting slope.

    `eta1` and `f_plus` are None below beta0, where the upper envelope g1 has
    no root.
    """

    beta: float
    beta0: float
    eta1: Optional[float]
    eta2: float
    f_plus: Optional[float]
    f_minus: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class FixedPointDiagnostics:
    """Convergence record of one Picard solve.

    Attributes:
        iterations: Number of sweeps performed.
        final_residual: Sup-norm of the last update Y_{k+1} - Y_k.
        eta_star_history: Free boundary detected at every sweep.
        residual_history: Sup-norm update of every sweep.
        damping: Damping factor the iteration finished with.
        front_gap: Minimum of the untruncated trajectory when it stays
            positive, 0 when a zero was found.
        quadrature_nodes: Gauss-Jacobi node count used by the EK operator.
        pinned_front: Front the trajectory was pinned to, None when beta
            was fixed instead.
    """

    iterations: int = 0
    final_residual: float = float("inf")
    eta_star_history: List[float] = field(default_factory=list)
    residual_history: List[float] = field(default_factory=list)
    damping: float = 1.0
    front_gap: float = 0.0
    quadrature_nodes: int = 0
    pinned_front: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "damping": self.damping,
            "front_gap": self.front_gap,
            "quadrature_nodes": self.quadrature_nodes,
            "pinned_front": self.pinned_front,
        }


@dataclass
class ShootingResult:
    """Outcome of the search for the no-flux slope beta*.

    Attributes:
        beta_star: Slope -U'(0) of the returned solution.
        eta_star: Free boundary of the returned solution. For a no-flux
            profile it is extrapolated from the pressure U^m.
        profile: Converged U profile.
        flux_residual: U^m U' at the front of the returned solution.
        bracket_history: Every (beta_lo, beta_hi) the search went through.
        picard_diagnostics: One FixedPointDiagnostics per pinned-front
            evaluation, in evaluation order.
        beta0: Admissibility threshold of the closed-form bounds.
        converged: Whether |flux_residual| met the shooting tolerance.
        bracket_collapsed: Whether the search stopped on bracket width.
        below_beta0: Whether beta_star lies below beta0.
        degenerate: Whether the no-flux slope lay below beta0 while the
            search was held at beta0, and the profile at beta0 was returned.
        roots: Slope pairs around every flux transition reported by a
            pre-scan or a fallback scan.
        evaluations: (beta, flux) for every pinned-front evaluation.
    """

    beta_star: float
    eta_star: float
    profile: Profile
    flux_residual: float
    bracket_history: List[Tuple[float, float]]
    picard_diagnostics: List[FixedPointDiagnostics]
    beta0: float
    converged: bool = False
    bracket_collapsed: bool = False
    below_beta0: bool = False
    degenerate: bool = False
    roots: List[Tuple[float, float]] = field(default_factory=list)
    evaluations: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def total_picard_iterations(self) -> int:
        return sum(d.iterations for d in self.picard_diagnostics)
