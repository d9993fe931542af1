"""
Comparison solvers.

Interference reduction (IR) minimizes the multi-user interference power
||H^T x - s||^2 over constant-envelope precoders:
    - gd_ir_solve: gradient descent on the transmit phases
    - rcg_ir_solve: Riemannian conjugate gradient on the complex circle
    - ceo_solve(..., "IR"): cross-entropy optimization over phases
Constructive interference (CI) minimizes max_i g_i:
    - ceo_solve(..., "CI"): cross-entropy optimization over phases
    - relaxed_ci_solve: projected subgradient on the relaxed set |x_n| <= sqrt(P_T/N),
      then per-entry normalization (a stand-in for the convex-toolbox solve)

Every solver returns a SolveReport whose precoder has exactly constant envelope.
"""

import logging
import math
import time
from dataclasses import replace
from typing import Callable, Dict, Optional

import numpy as np
from scipy.special import logsumexp, softmax

from .. import config
from ..exceptions import InvalidArgumentError, InvalidDimensionError, LineSearchError
from ..models.data_models import ChannelMatrix, SymbolVector
from ..models.geometry import CirclePoint, RealPoint
from ..models.solver_models import CeoConfig, PhaseVector, SolveReport, SolverConfig, TracePoint
from .manifold import CIRCLE, circle_project, circle_random
from .objective import eval_g_precoder, rotate_channel
from .solver import backtracking_search, conjugate_gradient, flop_model, rcg_solve
from .streams import derive_seed, stream

logger = logging.getLogger(__name__)


def _check_instance(H: ChannelMatrix, s: SymbolVector, power_budget: float) -> None:
    if H.n_users != s.n_users:
        raise InvalidDimensionError(f"Channel has {H.n_users} users but {s.n_users} symbols were given",
                                    H.n_users, s.n_users)
    if not power_budget > 0:
        raise InvalidArgumentError("power_budget", f"P_T must be positive, got {power_budget}")


def _validate(cfg: SolverConfig) -> SolverConfig:
    errors = cfg.validate()
    if errors:
        raise InvalidArgumentError("cfg", "Invalid solver configuration: " + " ".join(errors))
    return cfg


def _constant_envelope(x: np.ndarray, power_budget: float) -> np.ndarray:
    """Puts every entry on the circle of radius sqrt(P_T/N); zero entries get phase 0."""
    radius = math.sqrt(power_budget / x.size)
    return radius * np.exp(1j * np.angle(x))


def _report(tag: str, x: np.ndarray, power_budget: float, **fields) -> SolveReport:
    x = _constant_envelope(x, power_budget)
    return SolveReport(solver=tag, x=x, X_final=RealPoint.from_precoder(x, power_budget), **fields)


def ir_objective(x: np.ndarray, H: ChannelMatrix, s: SymbolVector) -> float:
    """
    Multi-user interference power ||H^T x - s||^2.

    Raises:
        InvalidDimensionError: If x, H and s do not fit together
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (H.n_antennas,):
        raise InvalidDimensionError(f"Precoder of shape {x.shape} does not fit {H.n_antennas} antennas",
                                    (H.n_antennas,), x.shape)
    if H.n_users != s.n_users:
        raise InvalidDimensionError(f"Channel has {H.n_users} users but {s.n_users} symbols were given",
                                    H.n_users, s.n_users)
    residual = H.data.T @ x - s.symbols
    return float(np.real(np.vdot(residual, residual)))


class PhaseGeometry:
    """Flat geometry on phase vectors: the retraction is plain addition."""

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.dot(u, v))

    def transport(self, point: PhaseVector, v: np.ndarray) -> np.ndarray:
        return v

    def retract(self, point: PhaseVector, v: np.ndarray, step: float) -> PhaseVector:
        return PhaseVector(point.theta + step * v)

    def combine(self, point, a: float, u: np.ndarray, b: float, v: np.ndarray) -> np.ndarray:
        return a * u + b * v

    def zero(self, point: PhaseVector) -> np.ndarray:
        return np.zeros_like(point.theta)


PHASES = PhaseGeometry()


def _phase_gradient(theta: np.ndarray, H: ChannelMatrix, s: SymbolVector, radius: float) -> np.ndarray:
    """d/dtheta_n of ||H^T x - s||^2, which is -2 Im(x_n (H conj(r))_n) with r = H^T x - s."""
    x = radius * np.exp(1j * theta)
    residual = H.data.T @ x - s.symbols
    return -2.0 * np.imag(x * (H.data @ np.conj(residual)))


def ir_curvature(H: ChannelMatrix) -> float:
    """Lipschitz constant 2 ||H||_2^2 of the Euclidean IR gradient, floored at CURVATURE_FLOOR."""
    return max(2.0 * float(np.linalg.norm(H.data, 2)) ** 2, config.CURVATURE_FLOOR)


def gd_ir_solve(H: ChannelMatrix, s: SymbolVector, power_budget: float,
                iters: int = config.GD_IR_ITERATIONS, cfg: Optional[SolverConfig] = None,
                *, coordinate: Optional[bool] = None) -> SolveReport:
    """
    Gradient descent on the transmit phases for the IR objective.

    Every iteration takes one backtracked step along the full phase gradient
    (or, with ``coordinate``, sweeps the antennas one at a time). Line
    searches start from armijo_initial / L, where L = 2 ||H||^2 P_T / N bounds
    the curvature in the phases (per antenna, 2 ||h_n||^2 P_T / N).

    Args:
        H: Channel matrix
        s: Desired symbols
        power_budget: Total transmit power P_T
        iters: Outer iterations; 0 returns the initialization
        cfg: Armijo constants, seed and stopping tolerance
        coordinate: Overrides ``cfg.gd_coordinate``

    Returns:
        SolveReport: Result with a non-increasing objective trace
    """
    _check_instance(H, s, power_budget)
    if iters < 0:
        raise InvalidArgumentError("iters", f"Iteration count must be non-negative, got {iters}")
    cfg = _validate(cfg or SolverConfig())
    coordinate = cfg.gd_coordinate if coordinate is None else coordinate
    N, M = H.n_antennas, H.n_users
    radius = math.sqrt(power_budget / N)
    grad_tol = cfg.resolve_grad_tol(N)
    full_step = cfg.armijo_initial / (ir_curvature(H) * radius ** 2)
    row_curvature = np.maximum(2.0 * np.sum(np.abs(H.data) ** 2, axis=1), config.CURVATURE_FLOOR)
    coordinate_steps = cfg.armijo_initial / (row_curvature * radius ** 2)
    started = time.perf_counter()

    point = PhaseVector(stream(cfg.seed, "gd-ir").uniform(0.0, 2 * np.pi, N))

    def cost(p: PhaseVector) -> float:
        return ir_objective(radius * np.exp(1j * p.theta), H, s)

    value = cost(point)
    grad = _phase_gradient(point.theta, H, s, radius)
    trace = [TracePoint(value)]
    grad_norms = [float(np.linalg.norm(grad))]
    stalled = False
    k = 0
    while k < iters and grad_norms[-1] >= grad_tol:
        try:
            if coordinate:
                for n in range(N):
                    g_n = _phase_gradient(point.theta, H, s, radius)[n]
                    if g_n == 0:
                        continue
                    direction = np.zeros(N)
                    direction[n] = -g_n
                    _, point, value, _ = backtracking_search(point, direction, cost, PHASES, cfg, value, -g_n * g_n,
                                                           coordinate_steps[n])
            else:
                _, point, value, _ = backtracking_search(point, -grad, cost, PHASES, cfg, value,
                                                         -float(np.dot(grad, grad)), full_step)
        except LineSearchError:
            logger.warning(f"GD-IR line search failed at iteration {k}; returning best iterate")
            stalled = True
            break
        k += 1
        grad = _phase_gradient(point.theta, H, s, radius)
        trace.append(TracePoint(value))
        grad_norms.append(float(np.linalg.norm(grad)))

    return _report(
        "gd-ir", point.to_precoder(power_budget), power_budget,
        objective_trace=trace,
        grad_norm_trace=grad_norms,
        iterations=k,
        converged=grad_norms[-1] < grad_tol,
        stalled=stalled,
        flops_estimate=k * flop_model(N, M, "gd-ir"),
        wall_time=time.perf_counter() - started,
    )


class CircleIRProblem:
    """IR objective on the complex circle manifold."""

    geometry = CIRCLE

    def __init__(self, H: ChannelMatrix, s: SymbolVector):
        self.H = H
        self.s = s

    def cost(self, point: CirclePoint) -> float:
        return ir_objective(point.data, self.H, self.s)

    def values(self, point: CirclePoint):
        value = self.cost(point)
        return value, value

    def gradient(self, point: CirclePoint) -> np.ndarray:
        residual = self.H.data.T @ point.data - self.s.symbols
        return circle_project(point, 2.0 * np.conj(self.H.data) @ residual)


def rcg_ir_solve(H: ChannelMatrix, s: SymbolVector, power_budget: float,
                 cfg: Optional[SolverConfig] = None) -> SolveReport:
    """
    Riemannian conjugate gradient for the IR objective on the complex circle.

    Uses the same Polak-Ribiere, transport-by-projection and Armijo loop as
    the CI solver, with line searches starting from armijo_initial / (2 ||H||^2).
    """
    _check_instance(H, s, power_budget)
    cfg = _validate(cfg or SolverConfig())
    N, M = H.n_antennas, H.n_users
    started = time.perf_counter()

    start = circle_random(N, math.sqrt(power_budget / N), stream(cfg.seed, "rcg-ir"))
    outcome = conjugate_gradient(CircleIRProblem(H, s), start, cfg, cfg.resolve_grad_tol(N),
                                 cfg.armijo_initial / ir_curvature(H))

    return _report(
        "rcg-ir", outcome.point.data, power_budget,
        objective_trace=[TracePoint(exact) for exact, _ in outcome.values],
        grad_norm_trace=outcome.grad_norms,
        iterations=outcome.iterations,
        converged=outcome.converged,
        stalled=outcome.stalled,
        flops_estimate=outcome.iterations * flop_model(N, M, "rcg-ir"),
        wall_time=time.perf_counter() - started,
    )


def ceo_solve(H: ChannelMatrix, s: SymbolVector, power_budget: float, objective_tag: str,
              cfg: Optional[CeoConfig] = None) -> SolveReport:
    """
    Cross-entropy optimization over transmit phases.

    Each antenna's phase is drawn from a wrapped Gaussian described by its
    first trigonometric moment m_n (mean angle arg m_n, spread
    sqrt(-2 ln |m_n|); m_n = 0 means uniform). Each iteration scores K
    samples, takes the ceil(rho K) best as the elite set and moves the moment
    towards the elite moment: m <- alpha * m_elite + (1 - alpha) * m.

    Args:
        H: Channel matrix
        s: Desired symbols
        power_budget: Total transmit power P_T
        objective_tag: "CI" (exact max form) or "IR" (interference power)
        cfg: Optimizer settings

    Returns:
        SolveReport: Best sample over all iterations; the trace holds the
        best-so-far score per iteration
    """
    _check_instance(H, s, power_budget)
    cfg = cfg or CeoConfig()
    errors = cfg.validate()
    if errors:
        raise InvalidArgumentError("cfg", "Invalid CEO configuration: " + " ".join(errors))
    tag = objective_tag.upper()
    if tag not in ("CI", "IR"):
        raise InvalidArgumentError("objective_tag", f"Unknown objective '{objective_tag}'. Expected CI or IR")
    if cfg.quantile * cfg.samples < 2:
        logger.warning(f"CEO elite set has {cfg.elite_size} member(s); the distribution refit is degenerate")

    N, M = H.n_antennas, H.n_users
    radius = math.sqrt(power_budget / N)
    solver_tag = f"ceo-{tag.lower()}"
    rng = stream(cfg.seed, solver_tag)
    started = time.perf_counter()

    if tag == "CI":
        weights = rotate_channel(H, s, power_budget).weights

        def score(theta: np.ndarray) -> np.ndarray:
            stacked = radius * np.hstack([np.cos(theta), np.sin(theta)])
            return np.max(stacked @ weights, axis=1)
    else:
        def score(theta: np.ndarray) -> np.ndarray:
            residual = (radius * np.exp(1j * theta)) @ H.data - s.symbols[np.newaxis, :]
            return np.sum(np.abs(residual) ** 2, axis=1)

    moment = np.zeros(N, dtype=complex)
    best_theta = None
    best_score = math.inf
    trace = []
    for _ in range(cfg.iterations):
        resultant = np.abs(moment)
        uniform = resultant < 1e-12
        spread = np.sqrt(-2.0 * np.log(np.where(uniform, 1.0, resultant)))
        gaussian = rng.standard_normal((cfg.samples, N))
        flat = rng.uniform(0.0, 2 * np.pi, (cfg.samples, N))
        theta = np.where(uniform, flat, np.angle(moment) + spread * gaussian)

        scores = score(theta)
        order = np.argsort(scores, kind="stable")
        if scores[order[0]] < best_score:
            best_score = float(scores[order[0]])
            best_theta = theta[order[0]].copy()
        trace.append(TracePoint(best_score))

        elite = theta[order[:cfg.elite_size]]
        moment = cfg.smoothing * np.mean(np.exp(1j * elite), axis=0) + (1 - cfg.smoothing) * moment

    return _report(
        solver_tag, PhaseVector(best_theta).to_precoder(power_budget), power_budget,
        objective_trace=trace,
        iterations=cfg.iterations,
        converged=False,
        flops_estimate=cfg.iterations * flop_model(N, M, "ceo", samples=cfg.samples),
        wall_time=time.perf_counter() - started,
    )


def clip_to_polydisc(x: np.ndarray, radius: float) -> np.ndarray:
    """Radial projection of every entry onto the disc |x_n| <= radius."""
    moduli = np.abs(x)
    outside = moduli > radius
    clipped = np.array(x, dtype=complex, copy=True)
    clipped[outside] = radius * x[outside] / moduli[outside]
    return clipped


def relaxed_ci_solve(H: ChannelMatrix, s: SymbolVector, power_budget: float,
                     cfg: Optional[SolverConfig] = None) -> SolveReport:
    """
    Relaxed-CI (surrogate): projected subgradient on the polydisc, then normalization.

    Minimizes the smoothed CI objective over {|x_n| <= sqrt(P_T/N)} with
    normalized gradient steps of length relaxed_step * radius / sqrt(k),
    radial clipping after every step and the best iterate kept. The best
    relaxed point is finally put on the constant-envelope set entry by entry.
    The last trace entry is the objective after normalization.
    """
    _check_instance(H, s, power_budget)
    cfg = _validate(cfg or SolverConfig())
    ch = rotate_channel(H, s, power_budget)
    N, M = H.n_antennas, H.n_users
    radius = math.sqrt(power_budget / N)
    # epsilon is expressed in power-normalized units, like the RCG solver
    epsilon = cfg.resolve_epsilon(s.amplitude, s.beta) / ch.scale
    started = time.perf_counter()

    x = np.zeros(N, dtype=complex)
    best_x, best_value = x, math.inf
    trace = []
    for k in range(1, cfg.relaxed_iterations + 1):
        g = eval_g_precoder(x, ch)
        gradient = ch.weights @ softmax(g / epsilon)
        norm = np.linalg.norm(gradient)
        if norm == 0:
            break
        step = cfg.relaxed_step * radius / math.sqrt(k)
        direction = gradient / norm
        x = clip_to_polydisc(x - step * (direction[:N] + 1j * direction[N:]), radius)

        g = eval_g_precoder(x, ch)
        exact = float(np.max(g))
        trace.append(TracePoint(exact, float(epsilon * logsumexp(g / epsilon))))
        if exact < best_value:
            best_x, best_value = x, exact

    x_final = _constant_envelope(best_x, power_budget)
    g = eval_g_precoder(x_final, ch)
    trace.append(TracePoint(float(np.max(g)), float(epsilon * logsumexp(g / epsilon))))

    return _report(
        "relaxed-ci", x_final, power_budget,
        objective_trace=trace,
        iterations=len(trace) - 1,
        converged=False,
        flops_estimate=(len(trace) - 1) * flop_model(N, M, "relaxed-ci"),
        wall_time=time.perf_counter() - started,
    )


# tag -> solve(H, s, P_T, solver_cfg, ceo_cfg)
SOLVERS: Dict[str, Callable[..., SolveReport]] = {
    "rcg-ci": lambda H, s, p, cfg, ceo: rcg_solve(H, s, p, cfg),
    "relaxed-ci": lambda H, s, p, cfg, ceo: relaxed_ci_solve(H, s, p, cfg),
    "ceo-ci": lambda H, s, p, cfg, ceo: ceo_solve(H, s, p, "CI", ceo),
    "rcg-ir": lambda H, s, p, cfg, ceo: rcg_ir_solve(H, s, p, cfg),
    "gd-ir": lambda H, s, p, cfg, ceo: gd_ir_solve(H, s, p, cfg.gd_iterations, cfg),
    "ceo-ir": lambda H, s, p, cfg, ceo: ceo_solve(H, s, p, "IR", ceo),
}


def run_solver(tag: str, H: ChannelMatrix, s: SymbolVector, power_budget: float,
               solver_cfg: Optional[SolverConfig] = None, ceo_cfg: Optional[CeoConfig] = None,
               seed: int = 0) -> SolveReport:
    """
    Dispatches to a solver by tag with a seed derived from (seed, tag).

    Raises:
        InvalidArgumentError: If the tag is unknown
    """
    tag = config.SOLVER_ALIASES.get(tag, tag)
    if tag not in config.SOLVER_TAGS:
        raise InvalidArgumentError("solver_tag", f"Unknown solver '{tag}'. "
                                   f"Expected one of: {', '.join(config.SOLVER_TAGS)}")
    derived = derive_seed(seed, tag)
    solver_cfg = solver_cfg or SolverConfig()
    ceo_cfg = ceo_cfg or CeoConfig()
    solver_cfg = replace(solver_cfg, seed=derived)
    ceo_cfg = replace(ceo_cfg, seed=derived)

    report = SOLVERS[tag](H, s, power_budget, solver_cfg, ceo_cfg)

    logger.debug(f"{tag}: objective {report.final_objective:.6g} after {report.iterations} iterations "
                 f"in {report.wall_time:.3g} s")
    return report
