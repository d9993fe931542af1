"""
Data models shared by the objective, the RCG solver and the baselines.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .. import config
from .geometry import RealPoint


@dataclass(frozen=True)
class RotatedChannel:
    """
    Channel rotated by the desired symbol phases, split into real parts, with
    the A, B, C, D blocks of the g_i linear forms precomputed.

    g_{2m-1} = (A_m^T x_R + C_m^T x_I), g_{2m} = (B_m^T x_R - D_m^T x_I),
    with x_R, x_I the rows of X divided by ``scale``.
    """
    h_tilde_R: np.ndarray
    h_tilde_I: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    beta: float
    u: float
    scale: float
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # 2N x 2M matrix W with g = W^T [x_R; x_I]; columns interleave the
        # (2m-1, 2m) pair of every user.
        n, m = self.A.shape
        weights = np.empty((2 * n, 2 * m))
        weights[:n, 0::2] = self.A
        weights[:n, 1::2] = self.B
        weights[n:, 0::2] = self.C
        weights[n:, 1::2] = -self.D
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def n_antennas(self) -> int:
        return self.A.shape[0]

    @property
    def n_users(self) -> int:
        return self.A.shape[1]

    @property
    def power_budget(self) -> float:
        return self.n_antennas / self.scale ** 2

    def normalized(self) -> "RotatedChannel":
        """Same channel with scale 1 (unit per-antenna power, P_T = N)."""
        return RotatedChannel(self.h_tilde_R, self.h_tilde_I, self.A, self.B, self.C, self.D,
                              self.beta, self.u, 1.0)


@dataclass(frozen=True)
class ObjectiveEval:
    """
    Evaluation of the CI objective at one point.

    Attributes:
        g: The 2M values g_i
        max_index: Smallest index attaining the maximum (0-based)
        exact_value: max_i g_i
        smoothed_value: Log-sum-exp value, None when not requested
        epsilon: Smoothing parameter used for smoothed_value
    """
    g: np.ndarray
    max_index: int
    exact_value: float
    smoothed_value: Optional[float] = None
    epsilon: Optional[float] = None

    def is_ci_feasible(self) -> bool:
        """Every noiseless received symbol lies inside its detection sector."""
        return self.exact_value <= 0.0


@dataclass
class SolverConfig:
    """
    Settings of the RCG solver and of the gradient-based baselines.

    ``grad_tol`` and ``epsilon`` default to None, meaning 1e-6*sqrt(N) and
    0.01*u*beta respectively, both resolved once the instance is known.
    """
    grad_tol: Optional[float] = None
    max_iters: int = config.MAX_ITERS
    epsilon: Optional[float] = None
    armijo_initial: float = config.ARMIJO_INITIAL
    armijo_contraction: float = config.ARMIJO_CONTRACTION
    armijo_slope: float = config.ARMIJO_SLOPE
    max_backtracks: int = config.MAX_BACKTRACKS
    restart_on_nondescent: bool = True
    pr_plus: bool = True
    continuation: bool = False
    seed: int = 0
    gd_iterations: int = config.GD_IR_ITERATIONS
    gd_coordinate: bool = False
    relaxed_iterations: int = config.RELAXED_ITERATIONS
    relaxed_step: float = config.RELAXED_INITIAL_STEP

    def validate(self) -> List[str]:
        """
        Validates the solver settings.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        errors = []
        if self.grad_tol is not None and not self.grad_tol > 0:
            errors.append("grad_tol must be positive.")
        if not (isinstance(self.max_iters, int) and self.max_iters >= 1):
            errors.append("max_iters must be a positive integer.")
        if self.epsilon is not None and not self.epsilon > 0:
            errors.append("epsilon must be positive.")
        if not self.armijo_initial > 0:
            errors.append("armijo_initial must be positive.")
        if not 0 < self.armijo_contraction < 1:
            errors.append("armijo_contraction must lie in (0, 1).")
        if not 0 < self.armijo_slope < 1:
            errors.append("armijo_slope must lie in (0, 1).")
        if not (isinstance(self.max_backtracks, int) and self.max_backtracks >= 1):
            errors.append("max_backtracks must be a positive integer.")
        if self.gd_iterations < 0:
            errors.append("gd_iterations must be non-negative.")
        if self.relaxed_iterations < 1:
            errors.append("relaxed_iterations must be positive.")
        if not self.relaxed_step > 0:
            errors.append("relaxed_step must be positive.")
        return errors

    def resolve_grad_tol(self, n_antennas: int) -> float:
        if self.grad_tol is not None:
            return self.grad_tol
        return config.GRAD_TOL_FACTOR * math.sqrt(n_antennas)

    def resolve_epsilon(self, u: float, beta: float) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return config.EPSILON_FACTOR * u * beta


@dataclass
class CeoConfig:
    """
    Cross-entropy optimizer settings.

    Attributes:
        iterations: Number of refit iterations T
        samples: Samples per iteration K
        quantile: Elite fraction rho
        smoothing: Update weight alpha
        seed: RNG seed
    """
    iterations: int = config.CEO_ITERATIONS
    samples: int = config.CEO_SAMPLES
    quantile: float = config.CEO_QUANTILE
    smoothing: float = config.CEO_SMOOTHING
    seed: int = 0

    def validate(self) -> List[str]:
        """
        Validates the optimizer settings.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        errors = []
        if not (isinstance(self.iterations, int) and self.iterations >= 1):
            errors.append("iterations must be a positive integer.")
        if not (isinstance(self.samples, int) and self.samples >= 1):
            errors.append("samples must be a positive integer.")
        if not 0 < self.quantile < 1:
            errors.append("quantile must lie in (0, 1).")
        if not 0 < self.smoothing <= 1:
            errors.append("smoothing must lie in (0, 1].")
        return errors

    @property
    def elite_size(self) -> int:
        return max(1, math.ceil(self.quantile * self.samples))


@dataclass(frozen=True)
class PhaseVector:
    """Transmit phases theta_n in [0, 2*pi)."""
    theta: np.ndarray

    def __post_init__(self):
        wrapped = np.mod(np.asarray(self.theta, dtype=float), 2 * np.pi)
        wrapped.setflags(write=False)
        object.__setattr__(self, "theta", wrapped)

    def to_precoder(self, power_budget: float) -> np.ndarray:
        n = self.theta.size
        return np.sqrt(power_budget / n) * np.exp(1j * self.theta)


@dataclass(frozen=True)
class TracePoint:
    """Objective values recorded at one iterate; ``smoothed`` is None for non-smooth solvers."""
    exact: float
    smoothed: Optional[float] = None


@dataclass
class SolveReport:
    """
    Output of any solver.

    Attributes:
        solver: Solver tag
        x: Complex constant-envelope precoder
        X_final: Manifold point of the precoder
        objective_trace: Objective values per iteration (CI max form or IR power)
        grad_norm_trace: Gradient norms per iteration (empty for derivative-free solvers)
        iterations: Iterations performed
        converged: True when the stopping tolerance was reached
        stalled: True when the line search gave up
        flops_estimate: Modeled floating point operations
        wall_time: Measured seconds
    """
    solver: str
    x: np.ndarray
    X_final: RealPoint
    objective_trace: List[TracePoint] = field(default_factory=list)
    grad_norm_trace: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    stalled: bool = False
    flops_estimate: int = 0
    wall_time: float = 0.0

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1].exact if self.objective_trace else float("nan")

    def envelope_deviation(self) -> float:
        """max_n ||x_n| - sqrt(P_T/N)|."""
        radius = math.sqrt(self.X_final.power_budget / self.x.size)
        return float(np.max(np.abs(np.abs(self.x) - radius)))
