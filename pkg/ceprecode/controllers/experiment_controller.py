"""
Experiment controller for ceprecode.

Runs the four experiment recipes of an ExperimentSpec (timing, SER against
SNR, SER against the number of users, and a single solve with objective
traces) and writes their CSVs and the run manifest.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional

from .. import config
from ..exceptions import ConfigParseError
from ..models.data_models import ExperimentSpec, SerResult, TimingResult
from ..services.baselines import run_solver
from ..services.config_parser import build_solver_configs
from ..services.error_handler import ErrorHandler
from ..services.objective import is_ci_feasible, rotate_channel
from ..services.results_io import ResultsStore, ser_rows, single_rows, timing_rows
from ..services.simulator import MonteCarloSimulator


class ExperimentController:
    """
    Drives one experiment from a validated spec to files on disk.

    Solves run on the simulator's thread pool; all files are written from
    the calling thread once the experiment has finished.
    """

    def __init__(self, spec: ExperimentSpec, threads: int = 1):
        self.logger = logging.getLogger(__name__)
        self.spec = spec
        solver_cfg, ceo_cfg = build_solver_configs(spec)
        self.simulator = MonteCarloSimulator(
            psk_order=spec.psk_order,
            amplitude=spec.amplitude,
            power_budget=spec.power_budget,
            coherence=spec.coherence,
            solver_cfg=solver_cfg,
            ceo_cfg=ceo_cfg,
            threads=threads,
            channel_model=spec.channel,
        )
        self.solver_cfg = solver_cfg
        self.ceo_cfg = ceo_cfg
        self.store = ResultsStore(spec.output_path)
        self.notes: Dict[str, object] = {}

    def execute(self) -> List[Path]:
        """
        Runs the experiment and writes its files.

        Returns:
            List[Path]: Every file written, manifest last

        Raises:
            CEPrecodeError: On invalid specs, unwritable paths or numerical failures
        """
        problems = self.spec.validate()
        if problems:
            raise ConfigParseError(" ".join(problems))

        self.store.prepare()
        self.logger.info(f"Running {self.spec.experiment} with solvers {', '.join(self.spec.solvers)} "
                         f"(master seed {self.spec.master_seed})")

        runners = {
            "ser_vs_snr": self._run_ser_vs_snr,
            "ser_vs_users": self._run_ser_vs_users,
            "timing": self._run_timing,
            "single_solve": self._run_single_solve,
        }
        runners[self.spec.experiment]()
        self.store.write_manifest(self.spec, self.notes)
        return list(self.store.written)

    def _run_ser_vs_snr(self) -> None:
        spec = self.spec
        results: List[SerResult] = []
        for tag in spec.solvers:
            self.logger.info(f"{config.SOLVER_LABELS[tag]}: N={spec.n_antennas}, M={spec.n_users}, "
                             f"{len(spec.snr_range)} SNR points x {spec.n_symbols} slots")
            sweep = self.simulator.run_ser_sweep(tag, spec.n_antennas, spec.n_users, spec.snr_range,
                                                 spec.n_symbols, spec.master_seed)
            results.extend(sweep.values())
        self.store.write_table("ser_vs_snr.csv", "ser_vs_snr", ser_rows(results, spec.record_wall_time))

    def _run_ser_vs_users(self) -> None:
        spec = self.spec
        results: List[SerResult] = []
        for tag in spec.solvers:
            for n_users in spec.m_range:
                self.logger.info(f"{config.SOLVER_LABELS[tag]}: N={spec.n_antennas}, M={n_users}, "
                                 f"{spec.snr_db} dB x {spec.n_symbols} slots")
                results.append(self.simulator.run_ser(tag, spec.n_antennas, n_users, spec.snr_db,
                                                      spec.n_symbols, spec.master_seed))
        self.store.write_table("ser_vs_users.csv", "ser_vs_users", ser_rows(results, spec.record_wall_time))

    def _run_timing(self) -> None:
        spec = self.spec
        rows: List[TimingResult] = []
        for tag in spec.solvers:
            self.logger.info(f"{config.SOLVER_LABELS[tag]}: timing {spec.trials} trials per M "
                             f"over {', '.join(map(str, spec.m_range))}")
            rows.extend(self.simulator.run_timing(tag, spec.n_antennas, spec.m_range, spec.trials,
                                                  spec.master_seed))
        self.store.write_table("timing.csv", "timing", timing_rows(rows))

        if spec.n_range:
            scaling, slope = self.simulator.run_n_scaling(spec.n_range, spec.n_users, spec.trials,
                                                          spec.master_seed)
            self.notes["rcg-ci log-log slope of time per iteration against N"] = f"{slope:.3f}"
            self.store.write_table("n_scaling.csv", "n_scaling", timing_rows(scaling))

    def _run_single_solve(self) -> None:
        spec = self.spec
        H, s = self.simulator.slot_instance(spec.n_antennas, spec.n_users, 0, spec.master_seed)
        channel = rotate_channel(H, s, spec.power_budget)
        outcomes = []
        for tag in spec.solvers:
            report = run_solver(tag, H, s, spec.power_budget, self.solver_cfg, self.ceo_cfg,
                                seed=spec.master_seed)
            feasible = is_ci_feasible(report.x, channel)
            self.logger.info(f"{config.SOLVER_LABELS[tag]}: objective {report.final_objective:.6g} after "
                             f"{report.iterations} iterations (ci_feasible={feasible})")
            outcomes.append((report, feasible))
        self.store.write_table("single_solve.csv", "single_solve",
                               single_rows(outcomes, spec.n_users, spec.record_wall_time))
        for report, _ in outcomes:
            self.store.write_trace(report)


def run_experiment(spec: ExperimentSpec, threads: int = 1,
                   error_handler: Optional[ErrorHandler] = None) -> int:
    """
    Runs an experiment and converts failures into an exit code.

    Returns:
        int: 0 on success, 1 for configuration errors, 2 for I/O errors,
        3 for numerical failures and any other unexpected error
    """
    error_handler = error_handler or ErrorHandler()
    try:
        ExperimentController(spec, threads).execute()
    except Exception as e:
        return error_handler.handle_error(e, f"experiment {spec.experiment}")['exit_code']
    return config.EXIT_SUCCESS
