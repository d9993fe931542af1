"""
Result files: CSV tables, run manifests, objective traces and plot data.

Every results CSV starts with one comment line carrying the schema version
and experiment name, followed by a pandas-written table with a fixed column
order. Files are UTF-8 with ``\\n`` line endings.
"""

import logging
import os
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy

from .. import __version__, config
from ..exceptions import ExperimentIOError, InvalidArgumentError, SchemaError
from ..models.data_models import ExperimentSpec, SerResult, TimingResult
from ..models.solver_models import SolveReport
from .config_parser import render

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# ceprecode"

SER_COLUMNS = [
    "solver", "snr_db", "n_users", "n_symbols", "symbols_sent", "errors", "ser", "ser_ci95",
    "ci_feasible_fraction", "mean_iters", "stall_count", "mean_time_s",
]
TIMING_COLUMNS = [
    "solver", "n_antennas", "n_users", "trials", "mean_time_s", "std_time_s", "mean_iters",
    "mean_flops", "time_per_iter_s", "stall_count",
]
SINGLE_COLUMNS = [
    "solver", "n_antennas", "n_users", "iterations", "converged", "stalled", "final_objective",
    "ci_feasible", "envelope_deviation", "flops", "wall_time_s",
]
TRACE_COLUMNS = ["iteration", "exact", "smoothed", "grad_norm"]

SCHEMAS: Dict[str, List[str]] = {
    "ser_vs_snr": SER_COLUMNS,
    "ser_vs_users": SER_COLUMNS,
    "timing": TIMING_COLUMNS,
    "n_scaling": TIMING_COLUMNS,
    "single_solve": SINGLE_COLUMNS,
    "trace": TRACE_COLUMNS,
}

PLOT_KINDS = ("ser", "time")


def ser_rows(results: Sequence[SerResult], record_wall_time: bool) -> pd.DataFrame:
    """One row per (solver, grid point); mean_time_s is empty unless record_wall_time."""
    rows = []
    for r in results:
        rows.append({
            "solver": r.solver,
            "snr_db": r.snr_db,
            "n_users": r.n_users,
            "n_symbols": r.n_slots,
            "symbols_sent": r.symbols_sent,
            "errors": r.symbol_errors,
            "ser": r.ser,
            "ser_ci95": r.ser_ci95,
            "ci_feasible_fraction": r.ci_feasible_fraction,
            "mean_iters": r.mean_iters,
            "stall_count": r.stall_count,
            "mean_time_s": r.mean_time if record_wall_time else None,
        })
    return pd.DataFrame(rows, columns=SER_COLUMNS)


def timing_rows(results: Sequence[TimingResult]) -> pd.DataFrame:
    rows = [{
        "solver": r.solver,
        "n_antennas": r.n_antennas,
        "n_users": r.n_users,
        "trials": r.trials,
        "mean_time_s": r.mean_time,
        "std_time_s": r.std_time,
        "mean_iters": r.mean_iters,
        "mean_flops": r.mean_flops,
        "time_per_iter_s": r.time_per_iteration,
        "stall_count": r.stall_count,
    } for r in results]
    return pd.DataFrame(rows, columns=TIMING_COLUMNS)


def single_rows(reports: Sequence[Tuple[SolveReport, bool]], n_users: int,
                record_wall_time: bool) -> pd.DataFrame:
    """Summary of single solves, given as (report, ci_feasible) pairs."""
    rows = [{
        "solver": report.solver,
        "n_antennas": report.x.size,
        "n_users": n_users,
        "iterations": report.iterations,
        "converged": report.converged,
        "stalled": report.stalled,
        "final_objective": report.final_objective,
        "ci_feasible": feasible,
        "envelope_deviation": report.envelope_deviation(),
        "flops": report.flops_estimate,
        "wall_time_s": report.wall_time if record_wall_time else None,
    } for report, feasible in reports]
    return pd.DataFrame(rows, columns=SINGLE_COLUMNS)


def trace_rows(report: SolveReport) -> pd.DataFrame:
    grad_norms = list(report.grad_norm_trace) + [None] * (len(report.objective_trace) - len(report.grad_norm_trace))
    rows = [{
        "iteration": k,
        "exact": point.exact,
        "smoothed": point.smoothed,
        "grad_norm": grad_norms[k],
    } for k, point in enumerate(report.objective_trace)]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


class ResultsStore:
    """
    Writes the files of one experiment run into an output directory.
    """

    def __init__(self, output_dir):
        self.logger = logging.getLogger(__name__)
        self.output_dir = Path(output_dir)
        self.written: List[Path] = []

    def prepare(self) -> None:
        """
        Creates the output directory and checks that it is writable.

        Raises:
            ExperimentIOError: If the directory cannot be created or written
        """
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ExperimentIOError(f"Cannot create output directory: {e}", str(self.output_dir)) from e
        if not os.access(self.output_dir, os.W_OK):
            raise ExperimentIOError("Output directory is not writable", str(self.output_dir))

    def _write_text(self, name: str, text: str) -> Path:
        path = self.output_dir / name
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            raise ExperimentIOError(f"Cannot write {name}: {e}", str(path)) from e
        self.written.append(path)
        return path

    def write_table(self, name: str, experiment: str, frame: pd.DataFrame) -> Path:
        """
        Writes a results table with its schema header line.

        Raises:
            SchemaError: If the frame's columns do not match the experiment schema
            ExperimentIOError: If the file cannot be written
        """
        expected = SCHEMAS[experiment]
        if list(frame.columns) != expected:
            raise SchemaError(f"Table for {experiment} has unexpected columns", expected, list(frame.columns))
        body = frame.to_csv(index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")
        header = f"{HEADER_PREFIX} schema={config.CSV_SCHEMA_VERSION} experiment={experiment}\n"
        path = self._write_text(name, header + body)
        self.logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_trace(self, report: SolveReport) -> Path:
        return self.write_table(f"trace_{report.solver}.csv", "trace", trace_rows(report))

    def write_manifest(self, spec: ExperimentSpec, notes: Optional[Dict[str, object]] = None) -> Path:
        """
        Writes the run manifest: the fully rendered configuration preceded by
        comment lines with library versions. The manifest is itself a valid
        configuration file.
        """
        lines = [
            f"# ceprecode {__version__}",
            f"# csv schema {config.CSV_SCHEMA_VERSION}",
            f"# numpy {np.__version__}, scipy {scipy.__version__}, pandas {pd.__version__}",
        ]
        for key, value in (notes or {}).items():
            lines.append(f"# {key}: {value}")
        return self._write_text(config.MANIFEST_NAME, "\n".join(lines) + "\n" + render(spec))


def read_header(path) -> Dict[str, str]:
    """
    Parses the schema header line of a results CSV.

    Raises:
        ExperimentIOError: If the file cannot be read
        SchemaError: If the file is empty or the header line is missing
    """
    try:
        with open(path, encoding="utf-8") as f:
            first = f.readline().strip()
    except OSError as e:
        raise ExperimentIOError(f"Cannot read results file: {e}", str(path)) from e
    if not first.startswith(HEADER_PREFIX):
        raise SchemaError(f"{path} has no ceprecode schema header", [HEADER_PREFIX], [first] if first else [])
    fields = dict(part.split("=", 1) for part in first[len(HEADER_PREFIX):].split() if "=" in part)
    if fields.get("schema") != str(config.CSV_SCHEMA_VERSION):
        raise SchemaError(f"{path} has schema version {fields.get('schema')}",
                          [f"schema={config.CSV_SCHEMA_VERSION}"], [first])
    return fields


def load_results(path, required: Optional[Sequence[str]] = None) -> Tuple[str, pd.DataFrame]:
    """
    Loads a results CSV and checks its columns.

    Args:
        path: CSV written by ResultsStore
        required: Columns that must be present; defaults to the experiment schema

    Returns:
        Tuple of (experiment name, table)

    Raises:
        SchemaError: If the header or columns are missing, or the table has no rows
        ExperimentIOError: If the file cannot be read
    """
    header = read_header(path)
    experiment = header.get("experiment", "")
    expected = list(required) if required is not None else SCHEMAS.get(experiment, [])
    try:
        frame = pd.read_csv(path, skiprows=1)
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path} has no table", expected, [])
    except (OSError, pd.errors.ParserError) as e:
        raise ExperimentIOError(f"Cannot parse results file: {e}", str(path)) from e

    missing = [column for column in expected if column not in frame.columns]
    if missing:
        raise SchemaError(f"{path} is missing columns {', '.join(missing)}", expected, list(frame.columns))
    if frame.empty:
        raise SchemaError(f"{path} has no rows", expected, list(frame.columns))
    return experiment, frame


def _plot_axes(experiment: str, kind: str) -> Tuple[str, str, str, str]:
    """(x column, y column, x label, y label) for a plot kind."""
    if kind == "ser":
        if experiment == "ser_vs_users":
            return "n_users", "ser", "Number of users M", "SER"
        return "snr_db", "ser", "SNR (dB)", "SER"
    if experiment == "n_scaling":
        return "n_antennas", "time_per_iter_s", "Number of antennas N", "Time per iteration (s)"
    return "n_users", "mean_time_s", "Number of users M", "Average execution time (s)"


def emit_plot_data(csv_path, kind: str, output_dir=None) -> Tuple[Path, Path]:
    """
    Writes gnuplot data blocks (one per solver) and a plotting script.

    SER plots use a logarithmic y axis, time plots a linear one.

    Args:
        csv_path: Results CSV written by ResultsStore
        kind: "ser" or "time"
        output_dir: Where to write; defaults to the CSV's directory

    Returns:
        Tuple of (data file path, script file path)

    Raises:
        InvalidArgumentError: If the kind is unknown
        SchemaError: If the CSV lacks the columns the plot needs
    """
    if kind not in PLOT_KINDS:
        raise InvalidArgumentError("kind", f"Unknown plot kind '{kind}'. Expected one of: {', '.join(PLOT_KINDS)}")

    csv_path = Path(csv_path)
    experiment = read_header(csv_path).get("experiment", "")
    x_col, y_col, x_label, y_label = _plot_axes(experiment, kind)
    _, frame = load_results(csv_path, ["solver", x_col, y_col])

    out = Path(output_dir) if output_dir is not None else csv_path.parent
    stem = csv_path.stem
    data_path = out / f"{stem}_{kind}.dat"
    script_path = out / f"{stem}_{kind}.gp"

    blocks = []
    titles = []
    for solver, group in frame.groupby("solver", sort=False):
        group = group.sort_values(x_col)
        lines = [f"# {solver}", f"# {x_col} {y_col}"]
        lines += [f"{x:.10g} {y:.10g}" for x, y in zip(group[x_col], group[y_col])]
        blocks.append("\n".join(lines))
        titles.append(config.SOLVER_LABELS.get(solver, solver))

    plots = ", \\\n     ".join(
        f"'{data_path.name}' index {i} using 1:2 with linespoints title \"{title}\""
        for i, title in enumerate(titles)
    )
    script = [
        "set terminal pngcairo size 800,600",
        f"set output '{stem}_{kind}.png'",
        f"set xlabel \"{x_label}\"",
        f"set ylabel \"{y_label}\"",
        "set grid",
        "set key top right",
    ]
    if kind == "ser":
        script.append("set logscale y")
    script.append(f"plot {plots}")

    try:
        out.mkdir(parents=True, exist_ok=True)
        # gnuplot separates indexed data blocks with two blank lines
        data_path.write_text("\n\n\n".join(blocks) + "\n", encoding="utf-8")
        script_path.write_text("\n".join(script) + "\n", encoding="utf-8")
    except OSError as e:
        raise ExperimentIOError(f"Cannot write plot data: {e}", str(out)) from e

    logger.info(f"Wrote {len(blocks)} data block(s) to {data_path} and script {script_path}")
    return data_path, script_path
