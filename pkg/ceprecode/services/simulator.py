"""
MU-MISO downlink simulation.

Channel generation, PSK symbol sourcing, transmission over y = H^T x + w,
minimum-angle PSK detection and the Monte Carlo drivers behind the SER and
timing experiments.

Every random draw of a slot comes from a stream keyed by
(master seed, slot or channel block, purpose), so all solvers run on the
same channels, symbols and noise and the results do not depend on thread
scheduling.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import erfc

from .. import config
from ..exceptions import InvalidArgumentError, InvalidDimensionError
from ..models.data_models import ChannelMatrix, NoiseModel, SerResult, SymbolVector, TimingResult, TrialResult
from ..models.solver_models import CeoConfig, SolveReport, SolverConfig
from .baselines import run_solver
from .objective import is_ci_feasible, rotate_channel
from .streams import derive_seed, stream

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator, None]

TIE_RULES = ("smaller", "larger")
TIE_TOL = 1e-12


def _rng(seed: Seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples: real and imaginary parts each N(0, 1/2)."""
    return math.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channel(n_antennas: int, n_users: int, seed: Seed = None) -> ChannelMatrix:
    """
    Draws H with i.i.d. CN(0, 1) entries.

    Raises:
        InvalidDimensionError: If N or M is below 1
    """
    if n_antennas < 1 or n_users < 1:
        raise InvalidDimensionError(f"Channel dimensions must be positive, got N={n_antennas}, M={n_users}",
                                    ">= 1", (n_antennas, n_users))
    if n_antennas < n_users:
        logger.warning(f"Fewer antennas than users (N={n_antennas}, M={n_users})")
    return ChannelMatrix(_complex_normal(_rng(seed), (n_antennas, n_users)))


def identity_channel(n_antennas: int, n_users: int) -> ChannelMatrix:
    """
    The first M columns of the N x N identity: antenna m reaches user m only.

    Raises:
        InvalidDimensionError: If N < M or either is below 1
    """
    if n_users < 1 or n_antennas < n_users:
        raise InvalidDimensionError(f"Identity channel needs N >= M >= 1, got N={n_antennas}, M={n_users}",
                                    ">= M", (n_antennas, n_users))
    return ChannelMatrix(np.eye(n_antennas, n_users, dtype=complex))


def draw_symbols(n_users: int, order: int, amplitude: float = 1.0, seed: Seed = None) -> SymbolVector:
    """
    Draws one L-PSK symbol per user, uniformly over the constellation.

    Raises:
        InvalidArgumentError: If L < 2 or u <= 0
        InvalidDimensionError: If M < 1
    """
    if not isinstance(order, (int, np.integer)) or order < 2:
        raise InvalidArgumentError("order", f"PSK order must be an integer >= 2, got {order}")
    if not amplitude > 0:
        raise InvalidArgumentError("amplitude", f"PSK amplitude must be positive, got {amplitude}")
    if n_users < 1:
        raise InvalidDimensionError(f"Number of users must be positive, got {n_users}", ">= 1", n_users)
    return SymbolVector(_rng(seed).integers(0, order, n_users), amplitude, int(order))


def transmit(H: ChannelMatrix, x: np.ndarray, noise: NoiseModel, seed: Seed = None) -> np.ndarray:
    """
    Received signal y = H^T x + w with w ~ CN(0, N0 I).

    The noise is drawn as sqrt(N0) times a unit CN(0, 1) draw, so the same
    seed at different SNRs gives scaled copies of one realization.

    Raises:
        InvalidDimensionError: If x does not have N entries
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (H.n_antennas,):
        raise InvalidDimensionError(f"Precoder of shape {x.shape} does not fit {H.n_antennas} antennas",
                                    (H.n_antennas,), x.shape)
    y = H.data.T @ x
    if not noise.enabled:
        return y
    return y + math.sqrt(noise.n0) * _complex_normal(_rng(seed), H.n_users)


class Detection(NamedTuple):
    """Detected constellation index; ``degenerate`` is set for y = 0."""
    index: int
    degenerate: bool


def _angular_distances(y: np.ndarray, order: int) -> np.ndarray:
    points = 2 * np.pi * np.arange(order) / order
    difference = np.angle(y)[..., np.newaxis] - points
    return np.abs(np.angle(np.exp(1j * difference)))


def _validate_detector(order: int, tie_rule: str) -> None:
    if not isinstance(order, (int, np.integer)) or order < 2:
        raise InvalidArgumentError("order", f"PSK order must be an integer >= 2, got {order}")
    if tie_rule not in TIE_RULES:
        raise InvalidArgumentError("tie_rule", f"Unknown tie rule '{tie_rule}'. Expected one of: {', '.join(TIE_RULES)}")


def detect_psk(y_m: complex, order: int, tie_rule: str = "smaller") -> Detection:
    """
    Minimum angular distance L-PSK detection of one received sample.

    Distances within 1e-12 of the minimum count as ties and go to the smaller
    index (or the larger one with ``tie_rule="larger"``). y = 0 has no phase
    and is detected as index 0 with the degenerate flag set.
    """
    _validate_detector(order, tie_rule)
    if y_m == 0:
        return Detection(0, True)
    distances = _angular_distances(np.asarray(y_m, dtype=complex), order)
    candidates = np.flatnonzero(distances <= distances.min() + TIE_TOL)
    index = candidates[0] if tie_rule == "smaller" else candidates[-1]
    return Detection(int(index), False)


def detect_psk_vector(y: np.ndarray, order: int) -> np.ndarray:
    """Vectorized detect_psk with the smaller-index tie rule; zero samples map to 0."""
    _validate_detector(order, "smaller")
    y = np.asarray(y, dtype=complex)
    distances = _angular_distances(y, order)
    within = distances <= distances.min(axis=-1, keepdims=True) + TIE_TOL
    indices = np.argmax(within, axis=-1)
    return np.where(y == 0, 0, indices)


def qpsk_ser_reference(snr_db) -> np.ndarray:
    """
    Single-user QPSK symbol error rate over AWGN, P_s = 2Q(sqrt(g)) - Q(sqrt(g))^2.

    Args:
        snr_db: Es/N0 in dB (scalar or array)
    """
    gamma = 10 ** (np.asarray(snr_db, dtype=float) / 10)
    q = 0.5 * erfc(np.sqrt(gamma) / math.sqrt(2))
    return 2 * q - q * q


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    if len(xs) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float)), 1)
    return float(slope)


class MonteCarloSimulator:
    """
    Runs solvers over random slots and aggregates SER and timing statistics.

    Slots run concurrently on a thread pool; aggregation is done in slot
    order with integer sums only.
    """

    def __init__(self, psk_order: int = config.DEFAULT_L, amplitude: float = config.DEFAULT_U,
                 power_budget: float = config.DEFAULT_P_T, coherence: int = config.DEFAULT_COHERENCE,
                 solver_cfg: Optional[SolverConfig] = None, ceo_cfg: Optional[CeoConfig] = None,
                 threads: int = 1, channel_model: str = config.DEFAULT_CHANNEL):
        if coherence < 1:
            raise InvalidArgumentError("coherence", f"Coherence length must be at least 1, got {coherence}")
        if threads < 1:
            raise InvalidArgumentError("threads", f"Thread count must be at least 1, got {threads}")
        if channel_model not in config.CHANNEL_MODELS:
            raise InvalidArgumentError("channel_model", f"Unknown channel model '{channel_model}'. "
                                       f"Expected one of: {', '.join(config.CHANNEL_MODELS)}")
        self.logger = logging.getLogger(__name__)
        self.psk_order = psk_order
        self.amplitude = amplitude
        self.power_budget = power_budget
        self.coherence = coherence
        self.solver_cfg = solver_cfg or SolverConfig()
        self.ceo_cfg = ceo_cfg or CeoConfig()
        self.threads = threads
        self.channel_model = channel_model

    def slot_instance(self, n_antennas: int, n_users: int, slot: int, seed: int) -> Tuple[ChannelMatrix, SymbolVector]:
        """Channel and symbols of a slot; the channel is shared by every slot of a coherence block."""
        block = slot // self.coherence
        if self.channel_model == "identity":
            H = identity_channel(n_antennas, n_users)
        else:
            H = generate_channel(n_antennas, n_users, stream(seed, block, "channel"))
        s = draw_symbols(n_users, self.psk_order, self.amplitude, stream(seed, slot, "symbols"))
        return H, s

    def solve_slot(self, solver_tag: str, n_antennas: int, n_users: int, slot: int,
                   seed: int) -> Tuple[ChannelMatrix, SymbolVector, SolveReport]:
        H, s = self.slot_instance(n_antennas, n_users, slot, seed)
        report = run_solver(solver_tag, H, s, self.power_budget, self.solver_cfg, self.ceo_cfg,
                            seed=derive_seed(seed, slot))
        return H, s, report

    def _ser_slot(self, solver_tag: str, n_antennas: int, n_users: int, snrs: Sequence[float],
                  seed: int, slot: int) -> List[TrialResult]:
        H, s, report = self.solve_slot(solver_tag, n_antennas, n_users, slot, seed)
        feasible = self.psk_order >= 3 and is_ci_feasible(report.x, rotate_channel(H, s, self.power_budget))

        trials = []
        for snr_db in snrs:
            noise = NoiseModel.from_snr_db(snr_db, self.power_budget)
            y = transmit(H, report.x, noise, stream(seed, slot, "noise"))
            errors = (detect_psk_vector(y, self.psk_order) != s.indices).astype(int)
            trials.append(TrialResult(
                symbol_errors=int(errors.sum()),
                symbols_sent=n_users,
                per_user_errors=errors,
                solver_iterations=report.iterations,
                wall_time=report.wall_time,
                ci_feasible=feasible,
                stalled=report.stalled,
                flops=report.flops_estimate,
            ))
        return trials

    def run_ser_sweep(self, solver_tag: str, n_antennas: int, n_users: int, snr_list: Sequence[float],
                      n_symbols: int, seed: int) -> Dict[float, SerResult]:
        """
        SER at several SNRs from one solve per slot.

        Each slot's precoder is transmitted at every SNR with the same unit
        noise draw scaled by sqrt(N0) (common random numbers).

        Returns:
            Dict mapping SNR in dB to its SerResult, in the order of snr_list
        """
        if n_symbols < 1:
            raise InvalidArgumentError("n_symbols", f"At least one symbol slot is required, got {n_symbols}")
        if not snr_list:
            raise InvalidArgumentError("snr_list", "SNR list must be non-empty")
        snrs = [float(v) for v in snr_list]
        results = {snr: SerResult(solver_tag, snr, n_users) for snr in snrs}

        def work(slot: int) -> List[TrialResult]:
            return self._ser_slot(solver_tag, n_antennas, n_users, snrs, seed, slot)

        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            for slot_trials in executor.map(work, range(n_symbols)):
                for snr, trial in zip(snrs, slot_trials):
                    results[snr].add(trial)

        for snr, result in results.items():
            if result.stall_count:
                self.logger.warning(f"{solver_tag} stalled in {result.stall_count} of {n_symbols} slots at {snr} dB")
        return results

    def run_ser(self, solver_tag: str, n_antennas: int, n_users: int, snr_db: float, n_symbols: int,
                seed: int) -> SerResult:
        """SER of one solver at one SNR; SER = symbol_errors / (n_symbols * M)."""
        return self.run_ser_sweep(solver_tag, n_antennas, n_users, [snr_db], n_symbols, seed)[float(snr_db)]

    def run_timing(self, solver_tag: str, n_antennas: int, m_list: Sequence[int], trials: int,
                   seed: int) -> List[TimingResult]:
        """
        Repeated single solves per user count, run one at a time.

        Trial t at user count M uses the instance of slot t, so every solver
        is timed on the same problems.
        """
        if trials < 1:
            raise InvalidArgumentError("trials", f"At least one trial is required, got {trials}")
        rows = []
        for n_users in m_list:
            row = TimingResult(solver_tag, n_antennas, int(n_users))
            for trial in range(trials):
                _, _, report = self.solve_slot(solver_tag, n_antennas, int(n_users), trial, derive_seed(seed, n_users))
                row.wall_times.append(report.wall_time)
                row.iterations.append(report.iterations)
                row.flops.append(report.flops_estimate)
                row.stall_count += int(report.stalled)
            self.logger.debug(f"{solver_tag} N={n_antennas} M={n_users}: mean {row.mean_time:.4g} s")
            rows.append(row)
        return rows

    def run_n_scaling(self, n_list: Sequence[int], n_users: int, trials: int, seed: int,
                      solver_tag: str = "rcg-ci") -> Tuple[List[TimingResult], float]:
        """
        Per-iteration solve time against N at a fixed user count.

        Returns:
            Tuple of (one TimingResult per N, fitted log-log slope of time per iteration against N)
        """
        if trials < 1:
            raise InvalidArgumentError("trials", f"At least one trial is required, got {trials}")
        rows = []
        for n_antennas in n_list:
            row = self.run_timing(solver_tag, int(n_antennas), [n_users], trials, derive_seed(seed, n_antennas))[0]
            rows.append(row)
        slope = fit_loglog_slope([row.n_antennas for row in rows], [row.time_per_iteration for row in rows])
        self.logger.info(f"{solver_tag} time per iteration grows as N^{slope:.2f}")
        return rows, slope
