"""
Unit tests for results tables, manifests and plot data.
"""

import numpy as np
import pandas as pd
import pytest

from ceprecode.exceptions import ExperimentIOError, InvalidArgumentError, SchemaError
from ceprecode.models.data_models import ExperimentSpec, SerResult, TimingResult, TrialResult
from ceprecode.models.geometry import RealPoint
from ceprecode.models.solver_models import SolveReport, TracePoint
from ceprecode.services.config_parser import parse_config
from ceprecode.services.results_io import (
    SER_COLUMNS,
    ResultsStore,
    emit_plot_data,
    load_results,
    read_header,
    ser_rows,
    single_rows,
    timing_rows,
    trace_rows,
)


def make_ser_result(solver, snr_db, errors, slots=4, n_users=2):
    result = SerResult(solver, snr_db, n_users)
    for slot in range(slots):
        wrong = 1 if slot < errors else 0
        result.add(TrialResult(wrong, n_users, np.array([wrong, 0]), solver_iterations=10,
                               wall_time=0.5, ci_feasible=not wrong))
    return result


def make_report(solver="rcg-ci"):
    x = np.exp(1j * np.array([0.1, 0.2, 0.3, 0.4])) / 2
    return SolveReport(
        solver=solver,
        x=x,
        X_final=RealPoint.from_precoder(x, 1.0),
        objective_trace=[TracePoint(1.0, 1.2), TracePoint(0.25, 0.3), TracePoint(-0.5, -0.4)],
        grad_norm_trace=[3.0, 1.0, 1e-7],
        iterations=2,
        converged=True,
        flops_estimate=100,
        wall_time=0.01,
    )


@pytest.fixture
def ser_csv(tmp_path):
    store = ResultsStore(tmp_path)
    store.prepare()
    results = [make_ser_result("rcg-ci", snr, 4 - snr // 4) for snr in (0, 4, 8)]
    results += [make_ser_result("gd-ir", snr, 4) for snr in (0, 4, 8)]
    return store.write_table("ser_vs_snr.csv", "ser_vs_snr", ser_rows(results, False))


class TestRowBuilders:
    """Test cases for the DataFrame builders."""

    def test_ser_rows(self):
        frame = ser_rows([make_ser_result("rcg-ci", 6.0, 1)], record_wall_time=False)
        row = frame.iloc[0]
        assert list(frame.columns) == SER_COLUMNS
        assert row["errors"] == 1
        assert row["symbols_sent"] == 8
        assert row["ser"] == pytest.approx(0.125)
        assert row["ci_feasible_fraction"] == pytest.approx(0.75)
        assert row["mean_iters"] == pytest.approx(10.0)
        assert pd.isna(row["mean_time_s"])

    def test_ser_rows_with_wall_time(self):
        frame = ser_rows([make_ser_result("rcg-ci", 6.0, 1)], record_wall_time=True)
        assert frame.iloc[0]["mean_time_s"] == pytest.approx(0.5)

    def test_timing_rows(self):
        row = TimingResult("rcg-ci", 64, 20, wall_times=[0.2, 0.4], iterations=[10, 30], flops=[5, 7])
        frame = timing_rows([row])
        assert frame.iloc[0]["mean_time_s"] == pytest.approx(0.3)
        assert frame.iloc[0]["time_per_iter_s"] == pytest.approx(0.6 / 40)
        assert frame.iloc[0]["trials"] == 2

    def test_single_rows(self):
        frame = single_rows([(make_report(), True)], n_users=2, record_wall_time=False)
        row = frame.iloc[0]
        assert row["n_antennas"] == 4
        assert row["final_objective"] == pytest.approx(-0.5)
        assert bool(row["ci_feasible"])
        assert row["envelope_deviation"] < 1e-12

    def test_trace_rows_pad_missing_gradient_norms(self):
        report = make_report()
        report.grad_norm_trace = [3.0]
        frame = trace_rows(report)
        assert list(frame["iteration"]) == [0, 1, 2]
        assert frame["grad_norm"].isna().sum() == 2


class TestResultsStore:
    """Test cases for writing result files."""

    def test_header_and_table(self, ser_csv):
        lines = ser_csv.read_text(encoding="utf-8").split("\n")
        assert lines[0] == "# ceprecode schema=1 experiment=ser_vs_snr"
        assert lines[1] == ",".join(SER_COLUMNS)
        assert "\r" not in ser_csv.read_text(encoding="utf-8")

    def test_load_round_trip(self, ser_csv):
        experiment, frame = load_results(ser_csv)
        assert experiment == "ser_vs_snr"
        assert len(frame) == 6
        assert frame["mean_time_s"].isna().all()

    def test_written_files_are_listed(self, tmp_path):
        store = ResultsStore(tmp_path / "nested" / "out")
        store.prepare()
        store.write_trace(make_report())
        store.write_manifest(ExperimentSpec(output_path=str(tmp_path)))
        assert [p.name for p in store.written] == ["trace_rcg-ci.csv", "manifest.txt"]

    def test_wrong_columns_are_rejected(self, tmp_path):
        store = ResultsStore(tmp_path)
        with pytest.raises(SchemaError):
            store.write_table("t.csv", "timing", pd.DataFrame({"solver": ["rcg-ci"]}))

    def test_manifest_is_a_configuration(self, tmp_path):
        spec = parse_config("experiment = ser_vs_snr\nN = 8\nM = 2\nsolver.max_iters = 40\n")
        store = ResultsStore(tmp_path)
        path = store.write_manifest(spec, {"note": "value"})
        text = path.read_text(encoding="utf-8")
        assert text.startswith("# ceprecode")
        assert "# note: value" in text
        assert parse_config(text) == spec

    def test_unwritable_location(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(ExperimentIOError):
            ResultsStore(blocker / "sub").prepare()


class TestLoading:
    """Test cases for reading result files back."""

    def test_missing_header(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("solver,ser\nrcg-ci,0.1\n")
        with pytest.raises(SchemaError):
            read_header(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaError):
            load_results(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ExperimentIOError):
            read_header(tmp_path / "absent.csv")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("# ceprecode schema=1 experiment=ser_vs_snr\nsolver,ser\nrcg-ci,0.1\n")
        with pytest.raises(SchemaError) as excinfo:
            load_results(path)
        assert "snr_db" in str(excinfo.value)

    def test_header_without_rows(self, tmp_path):
        path = tmp_path / "norows.csv"
        path.write_text("# ceprecode schema=1 experiment=trace\niteration,exact,smoothed,grad_norm\n")
        with pytest.raises(SchemaError):
            load_results(path)

    def test_wrong_schema_version(self, tmp_path):
        path = tmp_path / "v9.csv"
        path.write_text("# ceprecode schema=9 experiment=trace\niteration,exact,smoothed,grad_norm\n0,1,1,1\n")
        with pytest.raises(SchemaError):
            load_results(path)


class TestPlotData:
    """Test cases for gnuplot output."""

    def test_ser_plot(self, ser_csv):
        data_path, script_path = emit_plot_data(ser_csv, "ser")
        blocks = data_path.read_text(encoding="utf-8").strip("\n").split("\n\n\n")
        assert len(blocks) == 2
        assert blocks[0].startswith("# rcg-ci")
        assert len(blocks[0].splitlines()) == 2 + 3
        script = script_path.read_text(encoding="utf-8")
        assert "set logscale y" in script
        assert "index 1" in script
        assert data_path.name == "ser_vs_snr_ser.dat"

    def test_time_plot_is_linear(self, tmp_path):
        store = ResultsStore(tmp_path)
        row = TimingResult("rcg-ci", 64, 20, wall_times=[0.2], iterations=[10], flops=[5])
        path = store.write_table("timing.csv", "timing", timing_rows([row]))
        _, script_path = emit_plot_data(path, "time", tmp_path / "plots")
        script = script_path.read_text(encoding="utf-8")
        assert "logscale" not in script
        assert "Average execution time" in script

    def test_unknown_kind(self, ser_csv):
        with pytest.raises(InvalidArgumentError):
            emit_plot_data(ser_csv, "bar")

    def test_plot_needs_schema_header(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("solver,snr_db,ser\nrcg-ci,0,0.1\n")
        with pytest.raises(SchemaError):
            emit_plot_data(path, "ser")
