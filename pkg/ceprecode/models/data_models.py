"""
Data models for the downlink simulation and the experiment runner.

This module contains the core data classes used throughout the package
for representing channels, desired symbols, noise, per-slot trial outcomes,
aggregated SER results and experiment descriptions.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import config


EXPERIMENTS = ("timing", "ser_vs_snr", "ser_vs_users", "single_solve")


@dataclass(frozen=True)
class ChannelMatrix:
    """
    Downlink channel H = [h_1, ..., h_M] with one column per user.

    Attributes:
        data: Complex N x M matrix
    """
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=complex, copy=True)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n_antennas(self) -> int:
        return self.data.shape[0]

    @property
    def n_users(self) -> int:
        return self.data.shape[1]

    def validate(self) -> List[str]:
        """
        Validates the channel entries.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        errors = []
        if self.data.ndim != 2 or self.data.size == 0:
            errors.append(f"Channel must be a non-empty N x M matrix, got shape {self.data.shape}.")
        elif not np.all(np.isfinite(self.data)):
            errors.append("Channel has non-finite entries.")
        return errors


@dataclass(frozen=True)
class SymbolVector:
    """
    Desired L-PSK symbols s_m = u * exp(j * phi_m).

    Attributes:
        indices: Constellation index k_m of every user, phi_m = 2*pi*k_m/L
        amplitude: PSK amplitude u
        order: PSK order L
    """
    indices: np.ndarray
    amplitude: float = 1.0
    order: int = 4

    def __post_init__(self):
        indices = np.array(self.indices, dtype=int, copy=True).reshape(-1)
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @property
    def n_users(self) -> int:
        return self.indices.size

    @property
    def phases(self) -> np.ndarray:
        return 2 * np.pi * self.indices / self.order

    @property
    def half_angle(self) -> float:
        return math.pi / self.order

    @property
    def beta(self) -> float:
        return math.tan(self.half_angle)

    @property
    def symbol_energy(self) -> float:
        return self.amplitude ** 2

    @property
    def symbols(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phases)

    def validate(self) -> List[str]:
        """
        Validates the symbol vector.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        errors = []
        if not (isinstance(self.order, (int, np.integer)) and self.order >= 2):
            errors.append("PSK order must be an integer >= 2.")
            return errors
        if self.indices.size < 1:
            errors.append("At least one user symbol is required.")
        if np.any((self.indices < 0) | (self.indices >= self.order)):
            errors.append(f"Constellation indices must lie in 0..{self.order - 1}.")
        if not self.amplitude > 0:
            errors.append("Amplitude must be positive.")
        return errors


@dataclass(frozen=True)
class NoiseModel:
    """
    Circularly symmetric complex Gaussian noise CN(0, n0) per user.

    Attributes:
        n0: Noise power N0
        power_budget: P_T, used to report SNR = P_T / N0
        enabled: False disables noise entirely (y = H^T x)
    """
    n0: float
    power_budget: float = 1.0
    enabled: bool = True

    @classmethod
    def from_snr_db(cls, snr_db: float, power_budget: float = 1.0) -> "NoiseModel":
        return cls(n0=power_budget / 10 ** (snr_db / 10), power_budget=power_budget)

    @classmethod
    def noiseless(cls, power_budget: float = 1.0) -> "NoiseModel":
        return cls(n0=1.0, power_budget=power_budget, enabled=False)

    @property
    def snr_db(self) -> float:
        return 10 * math.log10(self.power_budget / self.n0)

    def validate(self) -> List[str]:
        errors = []
        if not self.n0 > 0:
            errors.append("Noise power must be positive.")
        return errors


@dataclass
class TrialResult:
    """
    Outcome of a single symbol slot for one solver at one SNR.

    Attributes:
        symbol_errors: Wrongly detected user symbols
        symbols_sent: User symbols transmitted (M)
        per_user_errors: Error indicator per user
        solver_iterations: Iterations used by the solver
        wall_time: Solver seconds
        ci_feasible: Every noiseless received symbol lies in its detection sector
        stalled: Solver line search gave up
        flops: Modeled flops of the solve
    """
    symbol_errors: int
    symbols_sent: int
    per_user_errors: np.ndarray
    solver_iterations: int = 0
    wall_time: float = 0.0
    ci_feasible: bool = False
    stalled: bool = False
    flops: int = 0

    def validate(self) -> List[str]:
        errors = []
        if self.symbol_errors > self.symbols_sent:
            errors.append("symbol_errors cannot exceed symbols_sent.")
        return errors


@dataclass
class SerResult:
    """
    Aggregate of many TrialResults for one solver at one SNR.

    Only integer sums and the wall-time total are accumulated so the result
    does not depend on the order trials finish in.
    """
    solver: str
    snr_db: float
    n_users: int
    n_slots: int = 0
    symbol_errors: int = 0
    symbols_sent: int = 0
    per_user_errors: Optional[np.ndarray] = None
    total_iterations: int = 0
    total_flops: int = 0
    total_wall_time: float = 0.0
    ci_feasible_count: int = 0
    stall_count: int = 0

    def add(self, trial: TrialResult) -> None:
        """Accumulates one slot."""
        if self.per_user_errors is None:
            self.per_user_errors = np.zeros(self.n_users, dtype=int)
        self.n_slots += 1
        self.symbol_errors += int(trial.symbol_errors)
        self.symbols_sent += int(trial.symbols_sent)
        self.per_user_errors += np.asarray(trial.per_user_errors, dtype=int)
        self.total_iterations += int(trial.solver_iterations)
        self.total_flops += int(trial.flops)
        self.total_wall_time += trial.wall_time
        self.ci_feasible_count += int(trial.ci_feasible)
        self.stall_count += int(trial.stalled)

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.symbols_sent if self.symbols_sent else float("nan")

    @property
    def ser_ci95(self) -> float:
        """Normal-approximation half-width of the 95% binomial confidence interval."""
        if not self.symbols_sent:
            return float("nan")
        p = self.ser
        return 1.96 * math.sqrt(max(p * (1 - p), 0.0) / self.symbols_sent)

    @property
    def ci_feasible_fraction(self) -> float:
        return self.ci_feasible_count / self.n_slots if self.n_slots else float("nan")

    @property
    def mean_iters(self) -> float:
        return self.total_iterations / self.n_slots if self.n_slots else float("nan")

    @property
    def mean_time(self) -> float:
        return self.total_wall_time / self.n_slots if self.n_slots else float("nan")


@dataclass
class TimingResult:
    """
    Repeated solves of one solver on one (N, M) configuration.

    Attributes:
        solver: Solver tag
        n_antennas: N
        n_users: M
        wall_times: Seconds per trial
        iterations: Iterations per trial
        flops: Modeled flops per trial
        stall_count: Trials whose line search gave up
    """
    solver: str
    n_antennas: int
    n_users: int
    wall_times: List[float] = field(default_factory=list)
    iterations: List[int] = field(default_factory=list)
    flops: List[int] = field(default_factory=list)
    stall_count: int = 0

    @property
    def trials(self) -> int:
        return len(self.wall_times)

    @property
    def mean_time(self) -> float:
        return float(np.mean(self.wall_times)) if self.wall_times else float("nan")

    @property
    def std_time(self) -> float:
        return float(np.std(self.wall_times)) if self.wall_times else float("nan")

    @property
    def mean_iters(self) -> float:
        return float(np.mean(self.iterations)) if self.iterations else float("nan")

    @property
    def mean_flops(self) -> float:
        return float(np.mean(self.flops)) if self.flops else float("nan")

    @property
    def time_per_iteration(self) -> float:
        """Total time over total iterations; trials that stopped at once count as one iteration."""
        if not self.wall_times:
            return float("nan")
        return float(np.sum(self.wall_times) / max(int(np.sum(self.iterations)), 1))


@dataclass
class ExperimentSpec:
    """
    A fully resolved experiment description.

    Attributes:
        experiment: One of timing, ser_vs_snr, ser_vs_users, single_solve
        solvers: Solver tags to run
        n_antennas: N
        n_users: M (single-value experiments)
        m_range: User counts for ser_vs_users and timing
        n_range: Antenna counts for the per-iteration scaling table of timing
        psk_order: L
        amplitude: u
        power_budget: P_T
        snr_db: SNR for single-SNR experiments
        snr_range: SNR grid for ser_vs_snr
        n_symbols: Symbol slots per grid point
        trials: Solves per grid point for timing
        coherence: Symbol slots sharing one channel realization
        channel: Channel model, "random" or "identity"
        master_seed: Seed every random stream derives from
        record_wall_time: Write measured times into deterministic result tables
        solver_overrides: SolverConfig / CeoConfig field overrides
        output_path: Directory results are written to
    """
    experiment: str = "single_solve"
    solvers: List[str] = field(default_factory=lambda: list(config.SOLVER_TAGS))
    n_antennas: int = config.DEFAULT_N
    n_users: int = config.DEFAULT_M
    m_range: List[int] = field(default_factory=lambda: list(range(12, 25, 2)))
    n_range: List[int] = field(default_factory=list)
    psk_order: int = config.DEFAULT_L
    amplitude: float = config.DEFAULT_U
    power_budget: float = config.DEFAULT_P_T
    snr_db: float = config.DEFAULT_SNR_DB
    snr_range: List[float] = field(default_factory=lambda: [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0])
    n_symbols: int = config.DEFAULT_N_SYMBOLS
    trials: int = config.DEFAULT_TRIALS
    coherence: int = config.DEFAULT_COHERENCE
    channel: str = config.DEFAULT_CHANNEL
    master_seed: int = config.DEFAULT_MASTER_SEED
    record_wall_time: bool = False
    solver_overrides: Dict[str, object] = field(default_factory=dict)
    output_path: str = str(config.DEFAULT_OUTPUT_DIR)

    def validate(self) -> List[str]:
        """
        Validates the experiment settings.

        Returns:
            List[str]: List of validation error messages. Empty list if all valid.
        """
        return [message for _, message in self.field_errors()]

    def user_counts(self) -> List[int]:
        """User counts the experiment runs with."""
        if self.experiment in ("ser_vs_users", "timing"):
            return list(self.m_range)
        return [self.n_users]

    def field_errors(self) -> List[Tuple[str, str]]:
        """Validation problems as (field name, message) pairs, in field order."""
        errors = []

        if self.experiment not in EXPERIMENTS:
            errors.append(("experiment", f"Unknown experiment '{self.experiment}'. "
                                         f"Expected one of: {', '.join(EXPERIMENTS)}."))

        if not self.solvers:
            errors.append(("solvers", "At least one solver is required."))
        for tag in self.solvers:
            if tag not in config.SOLVER_TAGS:
                errors.append(("solvers", f"Unknown solver '{tag}'."))

        if self.n_antennas < 1:
            errors.append(("n_antennas", "N must be a positive integer."))
        if self.n_users < 1:
            errors.append(("n_users", "M must be a positive integer."))
        if not self.m_range or any(m < 1 for m in self.m_range):
            errors.append(("m_range", "M_range must be a non-empty list of positive integers."))
        if any(n < 1 for n in self.n_range):
            errors.append(("n_range", "N_range entries must be positive integers."))
        if self.psk_order < 3:
            errors.append(("psk_order", "L must be at least 3 for constructive-interference precoding."))
        if not self.amplitude > 0:
            errors.append(("amplitude", "u must be positive."))
        if not self.power_budget > 0:
            errors.append(("power_budget", "P_T must be positive."))
        if not self.snr_range:
            errors.append(("snr_range", "snr_range must be non-empty."))
        if self.n_symbols < 1:
            errors.append(("n_symbols", "n_symbols must be at least 1."))
        if self.trials < 1:
            errors.append(("trials", "trials must be at least 1."))
        if self.coherence < 1:
            errors.append(("coherence", "coherence must be at least 1."))
        if self.channel not in config.CHANNEL_MODELS:
            errors.append(("channel", f"Unknown channel model '{self.channel}'. "
                                      f"Expected one of: {', '.join(config.CHANNEL_MODELS)}."))
        elif self.channel == "identity" and (
                self.n_antennas < max(self.user_counts(), default=1)
                or (self.experiment == "timing" and any(n < self.n_users for n in self.n_range))):
            errors.append(("channel", "The identity channel needs at least as many antennas as users."))
        if self.master_seed < 0:
            errors.append(("master_seed", "master_seed must be non-negative."))

        return errors
