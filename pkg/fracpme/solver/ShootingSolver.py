"""
This file stores a subclass of ProfileSolver, the ShootingSolver. It searches
for the slope beta* at which the converged profile carries no flux through the
wetting front,

    U(eta*)^m U'(eta*) = -beta + (1 - alpha/2) int_0^eta* I U(z) dz = 0.

At the first zero of S_beta(Y) the trajectory can only be decreasing, so the
front flux is never positive once a zero exists, and it reaches zero where the
trajectory becomes tangent to the axis. Close to that slope the fixed-beta
iteration has a nearly flat tail and its first zero jumps between sweeps.
The search is therefore run over the front: the trajectory is pinned to
vanish at a given front and beta is solved for at every Picard sweep. Short
fronts give negative flux, fronts at or beyond the no-flux front give the
no-flux profile followed by zeros. The search brackets the transition and
refines it by bisection or, optionally, by an Illinois-type regula falsi.
"""
import dataclasses
import multiprocessing
import warnings
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from tqdm.auto import tqdm
from typing_extensions import Literal

from fracpme.data import (
    FixedPointDiagnostics,
    ProblemParams,
    Profile,
    ShootingResult,
)
from fracpme.mixins import (
    PicardConvergenceError,
    ShootingBracketError,
    ShootingWarning,
    log_runtime,
    logger,
)
from fracpme.solver import volterra
from fracpme.solver.PicardSolver import PicardSolver
from fracpme.solver.ProfileSolver import ProfileSolver
from fracpme.solver.SolverConfig import SolverConfig
from fracpme.tools import bounds, ekoperator

MAX_BRACKET_STEPS = 60
MAX_REFINEMENT_STEPS = 200
MONOTONICITY_TOLERANCE = 1e-6
RETRY_DAMPING = 0.5
FALLBACK_SCAN_POINTS = 16

# a no-flux evaluation this close to its pinned front ends the search
PADDING_CELLS = 8


class FrontEvaluation(NamedTuple):
    """One pinned-front solve.

    `front` is the pinned front, `profile` the converged Y profile with the
    front it actually reached.
    """

    front: float
    beta: float
    flux: float
    profile: Profile
    diagnostics: FixedPointDiagnostics

    @property
    def padding(self) -> float:
        """Distance between the pinned and the reached front."""
        return self.front - self.profile.eta_star


def flux(
    profile: Profile,
    beta: float,
    params: ProblemParams,
    n_nodes: int = ekoperator.DEFAULT_NODES,
) -> float:
    """Front flux -beta + (1 - alpha/2) int_0^eta* I U(z) dz of a profile.

    The term (alpha/2) eta* I U(eta*) of the differentiated equation vanishes
    because U is zero beyond eta*.

    Args:
        profile: Converged U or Y profile with its free boundary.
        beta: Slope of the profile.
        params: Problem parameters.
        n_nodes: Initial Gauss-Jacobi node count.

    Returns:
        U(eta*)^m U'(eta*).
    """
    if np.isfinite(profile.eta_star):
        eta_star = profile.eta_star
    else:
        eta_star = profile.grid_end
    iu = ekoperator.ek_apply_grid(profile, params.alpha, n_nodes=n_nodes)
    return -beta + (1.0 - params.alpha / 2.0) * volterra.integrate_to_front(
        iu, profile.grid_step, eta_star
    )


def shooting_residual(
    beta: float,
    params: ProblemParams,
    config: Optional[SolverConfig] = None,
) -> Tuple[float, Profile, FixedPointDiagnostics]:
    """Signed no-flux residual of the converged profile at one slope.

    Runs the PicardSolver in gap mode, retrying once with damping 1/2 if
    the plain iteration does not converge. Slopes well away from beta*
    converge reliably; the ShootingSolver itself searches over the front.

    Returns:
        (residual, Y profile, diagnostics). The residual is the front gap
        when the trajectory stays positive and the front flux otherwise.

    Raises:
        PicardConvergenceError if the damped retry fails as well.
    """
    config = config if config is not None else SolverConfig()
    try:
        profile, diagnostics = PicardSolver(config).solve(
            params, beta, allow_gap=True
        )
    except PicardConvergenceError as error:
        if config.damping <= RETRY_DAMPING:
            raise
        logger.info(
            f"Picard iteration stalled at beta = {beta} (last update "
            f"{error.residual_history[-1]:.3e}); retrying with damping "
            f"{RETRY_DAMPING}."
        )
        config = dataclasses.replace(config, damping=RETRY_DAMPING)
        profile, diagnostics = PicardSolver(config).solve(
            params, beta, allow_gap=True
        )

    if diagnostics.front_gap > 0.0:
        return diagnostics.front_gap, profile, diagnostics
    return flux(profile, beta, params, config.n_nodes), profile, diagnostics


def front_residual(
    front: float,
    params: ProblemParams,
    config: Optional[SolverConfig] = None,
    initial: Optional[Profile] = None,
) -> FrontEvaluation:
    """Slope and front flux of the profile pinned to vanish at `front`.

    Retries once with damping 1/2 if the plain iteration does not converge.

    Raises:
        PicardConvergenceError if the damped retry fails as well.
    """
    config = config if config is not None else SolverConfig()
    try:
        profile, beta, front_flux, diagnostics = PicardSolver(
            config
        ).solve_pinned(params, front, initial=initial)
    except PicardConvergenceError as error:
        if config.damping <= RETRY_DAMPING:
            raise
        logger.info(
            f"Picard iteration stalled at front = {front} (last update "
            f"{error.residual_history[-1]:.3e}); retrying with damping "
            f"{RETRY_DAMPING}."
        )
        config = dataclasses.replace(config, damping=RETRY_DAMPING)
        profile, beta, front_flux, diagnostics = PicardSolver(
            config
        ).solve_pinned(params, front, initial=initial)
    return FrontEvaluation(front, beta, front_flux, profile, diagnostics)


def _front_task(arguments):
    front, params, config = arguments
    return front_residual(front, params, config)


class ShootingSolver(ProfileSolver):
    """
    Shooting for the no-flux condition at the wetting front.

    Args:
        config: Numerical settings of the inner Picard solves.
        shoot_tol: Tolerance on the absolute front flux. Fronts whose flux
            lies below -shoot_tol count as too short.
        width_tol: The search stops once the front bracket is this narrow,
            or one grid cell narrow if that is wider.
        method: "bisection" (default) or "secant" (Illinois regula falsi,
            which keeps the bracket).
        extend_below_beta0: Whether beta* may lie below beta0. Otherwise a
            solution below beta0 is replaced by the profile at beta0 and
            reported as a degenerate result.
        scan_points: If positive, evaluate the flux at this many fronts
            over the initial bracket before refining and report every
            transition found.
        jobs: Worker processes used by the scan.
    """

    def __init__(
        self,
        config: Optional[SolverConfig] = None,
        shoot_tol: float = 1e-8,
        width_tol: float = 1e-12,
        method: Literal["bisection", "secant"] = "bisection",
        extend_below_beta0: bool = True,
        scan_points: int = 0,
        jobs: int = 1,
    ):
        super().__init__(config)
        if method not in ("bisection", "secant"):
            raise ShootingBracketError(
                f"Unknown shooting method `{method}`."
            )
        self.shoot_tol = shoot_tol
        self.width_tol = width_tol
        self.method = method
        self.extend_below_beta0 = extend_below_beta0
        self.scan_points = scan_points
        self.jobs = jobs

        self.params: Optional[ProblemParams] = None
        self._evaluations: List[Tuple[float, float]] = []
        self._diagnostics: List[FixedPointDiagnostics] = []
        self._fronts: Dict[float, FrontEvaluation] = {}

    def _reset(self, params: ProblemParams) -> None:
        self.params = params
        self._evaluations, self._diagnostics, self._fronts = [], [], {}

    def _seed(self, front: float) -> Optional[Profile]:
        """Converged profile of the evaluated front closest to `front`."""
        if not self._fronts:
            return None
        nearest = min(self._fronts, key=lambda z: abs(np.log(z / front)))
        return self._fronts[nearest].profile

    def _evaluate(self, front: float) -> FrontEvaluation:
        if front in self._fronts:
            return self._fronts[front]
        evaluation = front_residual(
            front, self.params, self.config, initial=self._seed(front)
        )
        self._record(evaluation)
        return evaluation

    def _record(self, evaluation: FrontEvaluation) -> None:
        self._evaluations.append((evaluation.beta, evaluation.flux))
        self._diagnostics.append(evaluation.diagnostics)
        self._fronts[evaluation.front] = evaluation
        logger.info(
            f"front = {evaluation.front:.15g}: beta = {evaluation.beta:.15g}, "
            f"flux {evaluation.flux:.6e} after "
            f"{evaluation.diagnostics.iterations} Picard sweeps"
        )

    def _is_short(self, evaluation: FrontEvaluation) -> bool:
        return evaluation.flux < -self.shoot_tol

    def _is_monotone(self) -> bool:
        ordered = sorted(self._fronts.items())
        fluxes = np.array([evaluation.flux for _, evaluation in ordered])
        return bool(np.all(np.diff(fluxes) >= -MONOTONICITY_TOLERANCE))

    @staticmethod
    def _slopes(
        short: FrontEvaluation, long: FrontEvaluation
    ) -> Tuple[float, float]:
        return (min(short.beta, long.beta), max(short.beta, long.beta))

    def _scan(
        self, lower: float, upper: float, points: int
    ) -> List[Tuple[FrontEvaluation, FrontEvaluation]]:
        fronts = list(np.linspace(lower, upper, points))
        tasks = [(front, self.params, self.config) for front in fronts]
        if self.jobs > 1:
            with multiprocessing.Pool(processes=self.jobs) as pool:
                results = list(
                    tqdm(pool.imap(_front_task, tasks), total=len(tasks))
                )
        else:
            results = [_front_task(task) for task in tqdm(tasks)]

        for evaluation in results:
            if evaluation.front not in self._fronts:
                self._record(evaluation)

        return [
            (left, right)
            for left, right in zip(results, results[1:])
            if self._is_short(left) and not self._is_short(right)
        ]

    def scan(
        self, lower: float, upper: float, points: int
    ) -> List[Tuple[float, float]]:
        """Evaluates the front flux on an even grid of pinned fronts.

        Evaluations are independent, start from the linear profile and run
        on `jobs` worker processes.

        Returns:
            For every pair of neighbouring fronts where the flux passes from
            below -shoot_tol to above it, the (beta_lo, beta_hi) slopes of
            the pair, in order of increasing front.
        """
        return [
            self._slopes(short, long)
            for short, long in self._scan(lower, upper, points)
        ]

    def _bracket(
        self, start: float
    ) -> Tuple[FrontEvaluation, FrontEvaluation]:
        """Expands from `start` until one front is short and one is not.

        Doubles the front while its flux stays below -shoot_tol, or halves
        it while it does not.
        """
        first = self._evaluate(start)
        if self._is_short(first):
            short = first
            long = self._evaluate(2.0 * start)
            steps = 0
            while self._is_short(long):
                steps += 1
                if steps > MAX_BRACKET_STEPS:
                    raise ShootingBracketError(
                        f"Front flux stayed below {-self.shoot_tol} up to "
                        f"front = {long.front}."
                    )
                short = long
                long = self._evaluate(2.0 * long.front)
            return short, long

        long = first
        short = self._evaluate(start / 2.0)
        steps = 0
        while not self._is_short(short):
            steps += 1
            if steps > MAX_BRACKET_STEPS:
                raise ShootingBracketError(
                    f"Front flux stayed above {-self.shoot_tol} down to "
                    f"front = {short.front}."
                )
            long = short
            short = self._evaluate(short.front / 2.0)
        return short, long

    def _stop(
        self, short: FrontEvaluation, long: FrontEvaluation
    ) -> Tuple[bool, bool]:
        """Whether to stop, and whether the stop is on bracket width."""
        step = long.profile.grid_step
        if long.front - short.front <= max(self.width_tol, step):
            return True, True
        if abs(long.flux) <= self.shoot_tol and long.padding <= (
            PADDING_CELLS * step
        ):
            return True, False
        return False, False

    def _result(
        self,
        evaluation: FrontEvaluation,
        bracket_history,
        threshold: float,
        **flags,
    ) -> ShootingResult:
        if self._is_short(evaluation):
            eta_star = evaluation.profile.eta_star
        else:
            eta_star = volterra.extrapolate_front(
                evaluation.profile, self.params.m
            )
        return ShootingResult(
            beta_star=float(evaluation.beta),
            eta_star=float(eta_star),
            profile=evaluation.profile.as_u(),
            flux_residual=float(evaluation.flux),
            bracket_history=bracket_history,
            picard_diagnostics=list(self._diagnostics),
            beta0=float(threshold),
            converged=abs(evaluation.flux) <= self.shoot_tol,
            below_beta0=bool(evaluation.beta < threshold),
            evaluations=list(self._evaluations),
            **flags,
        )

    def _degenerate(self, threshold: float, bracket_history) -> ShootingResult:
        """The profile at beta0, for searches that may not go below it."""
        warnings.warn(
            "No-flux slope lies below beta0; returning the profile at beta0.",
            ShootingWarning,
        )
        profile, diagnostics = PicardSolver(self.config).solve(
            self.params, threshold
        )
        front_flux = flux(profile, threshold, self.params, self.config.n_nodes)
        self._evaluations.append((threshold, front_flux))
        self._diagnostics.append(diagnostics)
        return ShootingResult(
            beta_star=float(threshold),
            eta_star=float(profile.eta_star),
            profile=profile.as_u(),
            flux_residual=float(front_flux),
            bracket_history=bracket_history,
            picard_diagnostics=list(self._diagnostics),
            beta0=float(threshold),
            converged=abs(front_flux) <= self.shoot_tol,
            degenerate=True,
            evaluations=list(self._evaluations),
        )

    @logger.namespaced("ShootingSolver")
    @log_runtime
    def solve(self, params: ProblemParams) -> ShootingResult:
        """Finds the no-flux slope beta*.

        The search starts from the front eta1(beta0) and seeds every
        pinned solve with the converged profile of the nearest front
        evaluated so far.

        Args:
            params: Problem parameters.

        Returns:
            A ShootingResult with the converged U profile at beta*.

        Raises:
            ShootingBracketError if no transition is found within 60
                doublings (or halvings) of the front.
            PicardConvergenceError if an inner solve fails, carrying the
                last slope it reached.
        """
        self._reset(params)
        threshold = bounds.beta0(params)
        logger.info(
            f"Shooting for alpha = {params.alpha}, m = {params.m}, "
            f"beta0 = {threshold:.15g}"
        )

        short, long = self._bracket(bounds.eta1(threshold, params))
        first_bracket = (short.front, long.front)
        bracket_history = [self._slopes(short, long)]
        logger.info(
            f"Initial front bracket [{short.front:.15g}, {long.front:.15g}]"
        )

        roots = []
        pairs = []
        if self.scan_points > 1:
            pairs = self._scan(short.front, long.front, self.scan_points)
            roots = [self._slopes(*pair) for pair in pairs]
            if len(pairs) > 1:
                warnings.warn(
                    f"Found {len(pairs)} transitions of the front flux.",
                    ShootingWarning,
                )
            if pairs:
                short, long = pairs[0]
                bracket_history.append(self._slopes(short, long))

        scanned = bool(pairs)
        # secant weights; Illinois halves the weight of an endpoint kept twice
        w_short = short.flux + self.shoot_tol
        w_long = long.flux + self.shoot_tol
        kept = None
        collapsed = False
        for _ in range(MAX_REFINEMENT_STEPS):
            done, collapsed = self._stop(short, long)
            if done:
                break

            middle = 0.5 * (short.front + long.front)
            if self.method == "secant":
                candidate = long.front - w_long * (long.front - short.front) / (
                    w_long - w_short
                )
                if short.front < candidate < long.front:
                    middle = candidate

            evaluation = self._evaluate(middle)
            if self._is_short(evaluation):
                short, w_short = evaluation, evaluation.flux + self.shoot_tol
                if kept == "long":
                    w_long /= 2.0
                kept = "long"
            else:
                long, w_long = evaluation, evaluation.flux + self.shoot_tol
                if kept == "short":
                    w_short /= 2.0
                kept = "short"
            bracket_history.append(self._slopes(short, long))
            logger.info(
                f"Front bracket [{short.front:.15g}, {long.front:.15g}]"
            )

            if not scanned and not self._is_monotone():
                warnings.warn(
                    "Front flux is not monotone in the front; scanning the "
                    "initial bracket.",
                    ShootingWarning,
                )
                pairs = self._scan(
                    *first_bracket, max(self.scan_points, FALLBACK_SCAN_POINTS)
                )
                roots = [self._slopes(*pair) for pair in pairs]
                scanned = True
        else:
            warnings.warn(
                f"Front search stopped after {MAX_REFINEMENT_STEPS} "
                "refinements.",
                ShootingWarning,
            )

        if not self.extend_below_beta0 and long.beta < threshold:
            return self._degenerate(threshold, bracket_history)

        best = long if abs(long.flux) <= abs(short.flux) else short
        result = self._result(
            best,
            bracket_history,
            threshold,
            bracket_collapsed=collapsed,
            roots=roots,
        )
        logger.info(
            f"beta* = {result.beta_star:.15g}, eta* = {result.eta_star:.15g}, "
            f"flux {result.flux_residual:.3e}"
        )
        return result


def shoot(
    params: ProblemParams,
    config: Optional[SolverConfig] = None,
    shoot_tol: float = 1e-8,
    **kwargs,
) -> ShootingResult:
    """Functional entry point to ShootingSolver.solve."""
    return ShootingSolver(config, shoot_tol=shoot_tol, **kwargs).solve(params)
