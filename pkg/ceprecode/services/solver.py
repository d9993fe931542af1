"""
Riemannian conjugate gradient for constructive-interference CE precoding.

The loop works with any geometry exposing ``inner``, ``transport``,
``retract``, ``combine`` and ``zero`` (see ``manifold.ObliqueGeometry`` and
``manifold.CircleGeometry``), so the interference-reduction baseline on the
complex circle reuses the same Polak-Ribiere / Armijo machinery.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from .. import config
from ..exceptions import (
    DegenerateRetractionError,
    InvalidArgumentError,
    InvalidDimensionError,
    LineSearchError,
)
from ..models.data_models import ChannelMatrix, SymbolVector
from ..models.geometry import RealPoint, TangentVector
from ..models.solver_models import RotatedChannel, SolveReport, SolverConfig, TracePoint
from .manifold import OBLIQUE, oblique_random
from .objective import evaluate, riemannian_gradient, rotate_channel, smoothed_objective

logger = logging.getLogger(__name__)

FLOP_TAGS = ("gradient", "direction", "rcg-ci", "rcg-ir", "gd-ir", "ceo", "relaxed-ci")


def polak_ribiere(g_new, g_old, X_new, *, clamp: bool = True, geometry=OBLIQUE) -> float:
    """
    Riemannian Polak-Ribiere coefficient.

    mu = <g_new, g_new - T(g_old)> / <g_old, g_old>, where T transports g_old
    to the tangent space at X_new. With ``clamp`` the result is max(mu, 0).

    Returns:
        float: The coefficient, 0 when g_old is the zero vector
    """
    denominator = geometry.inner(g_old, g_old)
    if denominator == 0:
        return 0.0
    moved = geometry.transport(X_new, g_old)
    difference = geometry.combine(X_new, 1.0, g_new, -1.0, moved)
    mu = geometry.inner(g_new, difference) / denominator
    return max(mu, 0.0) if clamp else mu


def descent_direction(grad, prev_dir, mu: float, X, *, restart_on_nondescent: bool = True, geometry=OBLIQUE):
    """
    Pi_k = -grad + mu * T(Pi_{k-1}).

    When the result is not a descent direction and ``restart_on_nondescent``
    is set, -grad is returned instead.
    """
    if mu == 0:
        return geometry.combine(X, -1.0, grad, 0.0, grad)

    moved = geometry.transport(X, prev_dir)
    direction = geometry.combine(X, -1.0, grad, mu, moved)
    if restart_on_nondescent and geometry.inner(direction, grad) >= 0:
        logger.debug("Conjugate direction is not a descent direction; restarting with -grad")
        return geometry.combine(X, -1.0, grad, 0.0, grad)
    return direction


def backtracking_search(point, direction, cost: Callable, geometry, cfg: SolverConfig,
                        value: float, slope: float,
                        initial_step: Optional[float] = None) -> Tuple[float, object, float, int]:
    """
    Armijo backtracking shared by every geometry.

    Tries step = initial_step * armijo_contraction**t for t = 0..max_backtracks,
    where initial_step defaults to armijo_initial,
    and accepts the first one with cost(R(step*dir)) <= value + armijo_slope*step*slope.
    A step that makes the retraction degenerate counts as rejected.

    Returns:
        Tuple of (step, next point, next cost, number of contractions)

    Raises:
        LineSearchError: If no step is accepted
    """
    step = cfg.armijo_initial if initial_step is None else initial_step
    for t in range(cfg.max_backtracks + 1):
        try:
            candidate = geometry.retract(point, direction, step)
        except DegenerateRetractionError:
            step *= cfg.armijo_contraction
            continue
        candidate_value = cost(candidate)
        if candidate_value <= value + cfg.armijo_slope * step * slope:
            return step, candidate, candidate_value, t
        step *= cfg.armijo_contraction
    raise LineSearchError(f"No sufficient decrease after {cfg.max_backtracks} contractions",
                          cfg.max_backtracks)


def armijo_step(X: RealPoint, direction: TangentVector, ch: RotatedChannel, epsilon: float,
                cfg: SolverConfig, *, value: Optional[float] = None,
                slope: Optional[float] = None) -> Tuple[float, RealPoint]:
    """
    Armijo step on the oblique manifold for the smoothed CI objective.

    Args:
        X: Current point
        direction: Descent direction tangent at X
        ch: Rotated channel
        epsilon: Smoothing parameter
        cfg: Armijo constants
        value: f(X) if already known
        slope: <grad f(X), direction> if already known

    Returns:
        Tuple of (accepted step, next point)

    Raises:
        InvalidArgumentError: If direction is not a descent direction
        LineSearchError: If no step within max_backtracks is accepted
    """
    if value is None:
        value = smoothed_objective(X, ch, epsilon)
    if slope is None:
        slope = OBLIQUE.inner(riemannian_gradient(X, ch, epsilon), direction)
    if not slope < 0:
        raise InvalidArgumentError("direction", f"Not a descent direction (slope {slope:.3e})")

    step, X_next, _, _ = backtracking_search(
        X, direction, lambda P: smoothed_objective(P, ch, epsilon), OBLIQUE, cfg, value, slope)
    return step, X_next


def flop_model(n_antennas: int, n_users: int, algorithm_tag: str, samples: Optional[int] = None) -> int:
    """
    Per-iteration flop counts.

    ``gradient`` is the gradient / Polak-Ribiere stage of an RCG-CI iteration
    (16N^2 + 14MN + 18M + 16N), ``direction`` the direction stage (4N^2 + 6N)
    and ``rcg-ci`` their sum. The baseline tags return leading-order counts:
    ``rcg-ir`` MN, ``gd-ir`` MN^2, ``ceo`` KMN and ``relaxed-ci`` 8MN.

    Raises:
        InvalidArgumentError: If N or M is below 1 or the tag is unknown
    """
    N, M = int(n_antennas), int(n_users)
    if N < 1 or M < 1:
        raise InvalidArgumentError("n_antennas", f"N and M must be positive, got N={N}, M={M}")

    gradient_stage = 16 * N * N + 14 * M * N + 18 * M + 16 * N
    direction_stage = 4 * N * N + 6 * N

    if algorithm_tag == "gradient":
        return gradient_stage
    if algorithm_tag == "direction":
        return direction_stage
    if algorithm_tag == "rcg-ci":
        return gradient_stage + direction_stage
    if algorithm_tag == "rcg-ir":
        return M * N
    if algorithm_tag == "gd-ir":
        return M * N * N
    if algorithm_tag == "ceo":
        return (samples or config.CEO_SAMPLES) * M * N
    if algorithm_tag == "relaxed-ci":
        return 8 * M * N
    raise InvalidArgumentError("algorithm_tag", f"Unknown flop model '{algorithm_tag}'. "
                               f"Expected one of: {', '.join(FLOP_TAGS)}")


@dataclass
class CGOutcome:
    """Result of one conjugate gradient run in the problem's own units."""
    point: object
    values: List[Tuple[float, float]] = field(default_factory=list)  # (exact, smoothed)
    grad_norms: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    stalled: bool = False


class ObliqueCIProblem:
    """Smoothed CI objective on the oblique manifold."""

    geometry = OBLIQUE

    def __init__(self, channel: RotatedChannel, epsilon: float):
        self.channel = channel
        self.epsilon = epsilon

    def cost(self, point: RealPoint) -> float:
        return smoothed_objective(point, self.channel, self.epsilon)

    def values(self, point: RealPoint) -> Tuple[float, float]:
        evaluation = evaluate(point, self.channel, self.epsilon)
        return evaluation.exact_value, evaluation.smoothed_value

    def gradient(self, point: RealPoint) -> TangentVector:
        return riemannian_gradient(point, self.channel, self.epsilon)


def conjugate_gradient(problem, start, cfg: SolverConfig, grad_tol: float,
                       initial_step: Optional[float] = None) -> CGOutcome:
    """
    Riemannian conjugate gradient loop.

    The gradient is evaluated once per iterate and the stopping guard
    (k < max_iters and ||grad|| >= grad_tol) is tested before each step. When
    the line search fails the direction is reset to -grad once; a second
    failure ends the run with ``stalled`` set and the current (best) iterate.

    Args:
        problem: Object with ``geometry``, ``cost``, ``values`` and ``gradient``
        start: Initial point
        cfg: Solver settings
        grad_tol: Stopping threshold on the gradient norm
        initial_step: First trial step of every line search (armijo_initial when None)

    Returns:
        CGOutcome: Final point and traces
    """
    geometry = problem.geometry
    point = start
    grad = problem.gradient(point)
    grad_norm = math.sqrt(geometry.inner(grad, grad))
    exact, value = problem.values(point)
    outcome = CGOutcome(point=point, values=[(exact, value)], grad_norms=[grad_norm])

    direction = geometry.combine(point, -1.0, grad, 0.0, grad)
    k = 0
    while k < cfg.max_iters and grad_norm >= grad_tol:
        slope = geometry.inner(grad, direction)
        steepest = False
        if slope >= 0:
            direction = geometry.combine(point, -1.0, grad, 0.0, grad)
            slope = geometry.inner(grad, direction)
            steepest = True

        try:
            step, new_point, new_value, _ = backtracking_search(
                point, direction, problem.cost, geometry, cfg, value, slope, initial_step)
        except LineSearchError:
            if steepest:
                logger.warning(f"Line search failed along -grad at iteration {k}; returning best iterate")
                outcome.stalled = True
                break
            logger.warning(f"Line search failed at iteration {k}; restarting along -grad")
            direction = geometry.combine(point, -1.0, grad, 0.0, grad)
            slope = geometry.inner(grad, direction)
            try:
                step, new_point, new_value, _ = backtracking_search(
                    point, direction, problem.cost, geometry, cfg, value, slope, initial_step)
            except LineSearchError:
                logger.warning(f"Line search failed again at iteration {k}; returning best iterate")
                outcome.stalled = True
                break

        k += 1
        new_grad = problem.gradient(new_point)
        mu = polak_ribiere(new_grad, grad, new_point, clamp=cfg.pr_plus, geometry=geometry)
        direction = descent_direction(new_grad, direction, mu, new_point,
                                      restart_on_nondescent=cfg.restart_on_nondescent, geometry=geometry)

        point, grad, value = new_point, new_grad, new_value
        grad_norm = math.sqrt(geometry.inner(grad, grad))
        exact, _ = problem.values(point)
        outcome.values.append((exact, value))
        outcome.grad_norms.append(grad_norm)

    outcome.point = point
    outcome.iterations = k
    outcome.converged = grad_norm < grad_tol
    return outcome


def _validate_config(cfg: SolverConfig) -> None:
    errors = cfg.validate()
    if errors:
        raise InvalidArgumentError("cfg", "Invalid solver configuration: " + " ".join(errors))


def rcg_solve(H: ChannelMatrix, s: SymbolVector, power_budget: float,
              cfg: Optional[SolverConfig] = None, *, initial: Optional[RealPoint] = None) -> SolveReport:
    """
    RCG for CI-based constant-envelope precoding.

    The loop runs on the power-normalized forms (scale 1), so the iterate
    sequence does not depend on P_T; objective values are reported in
    physical units. With ``cfg.continuation`` a second stage at epsilon/4 is
    warm-started from the first.

    Args:
        H: Channel matrix
        s: Desired symbols
        power_budget: Total transmit power P_T
        cfg: Solver settings (defaults when None)
        initial: Starting point; drawn from ``cfg.seed`` when None

    Returns:
        SolveReport: Precoder, traces and counters. A line-search stall is
        reported through ``stalled`` rather than raised.
    """
    cfg = cfg or SolverConfig()
    _validate_config(cfg)
    channel = rotate_channel(H, s, power_budget)
    N, M = H.n_antennas, H.n_users

    if initial is None:
        start = oblique_random(N, cfg.seed, power_budget)
    else:
        if initial.data.shape != (2, N):
            raise InvalidDimensionError(f"Initial point of shape {initial.data.shape} does not fit N={N}",
                                        (2, N), initial.data.shape)
        start = RealPoint(initial.data, power_budget)

    epsilon = cfg.resolve_epsilon(s.amplitude, s.beta)
    grad_tol = cfg.resolve_grad_tol(N)
    stages = [epsilon, epsilon / 4.0] if cfg.continuation else [epsilon]
    working = channel.normalized()

    logger.debug(f"RCG-CI start: N={N}, M={M}, epsilon={epsilon:.3g}, grad_tol={grad_tol:.3g}")
    started = time.perf_counter()

    trace: List[TracePoint] = []
    grad_norms: List[float] = []
    iterations = 0
    point = start
    outcome = None
    for stage_epsilon in stages:
        outcome = conjugate_gradient(ObliqueCIProblem(working, stage_epsilon), point, cfg, grad_tol)
        point = outcome.point
        iterations += outcome.iterations
        values = outcome.values if not trace else outcome.values[1:]
        norms = outcome.grad_norms if not grad_norms else outcome.grad_norms[1:]
        trace.extend(TracePoint(exact / channel.scale, smoothed / channel.scale) for exact, smoothed in values)
        grad_norms.extend(norms)
        if outcome.stalled:
            break

    wall_time = time.perf_counter() - started
    X_final = RealPoint(point.data, power_budget)
    logger.debug(f"RCG-CI done: {iterations} iterations, converged={outcome.converged}, "
                 f"objective={trace[-1].exact:.6g}")

    return SolveReport(
        solver="rcg-ci",
        x=X_final.to_precoder(),
        X_final=X_final,
        objective_trace=trace,
        grad_norm_trace=grad_norms,
        iterations=iterations,
        converged=outcome.converged,
        stalled=outcome.stalled,
        flops_estimate=iterations * flop_model(N, M, "rcg-ci"),
        wall_time=wall_time,
    )
