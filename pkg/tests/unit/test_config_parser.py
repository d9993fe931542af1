"""
Unit tests for the key-value configuration parser.
"""

import pytest

from ceprecode.exceptions import ConfigParseError
from ceprecode.models.data_models import ExperimentSpec
from ceprecode.services.config_parser import _parse_int, build_solver_configs, expand_range, parse_config, render


class TestExpandRange:
    """Test cases for range and list expansion."""

    def test_inclusive_float_range(self):
        assert expand_range("0:2:12") == [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0]

    def test_inclusive_int_range(self):
        assert expand_range("12:2:24", _parse_int) == [12, 14, 16, 18, 20, 22, 24]

    def test_fractional_step_reaches_stop(self):
        values = expand_range("0:0.1:0.3")
        assert len(values) == 4
        assert values[-1] == pytest.approx(0.3)

    def test_descending_range(self):
        assert expand_range("4:-2:0") == [4.0, 2.0, 0.0]

    def test_comma_list(self):
        assert expand_range("1, 2.5,4") == [1.0, 2.5, 4.0]

    @pytest.mark.parametrize("text", ["0:0:4", "4:1:0", "1:2", ", ,"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            expand_range(text)


class TestParseConfig:
    """Test cases for parse_config."""

    def test_empty_text_gives_defaults(self):
        assert parse_config("") == ExperimentSpec()

    def test_full_configuration(self):
        text = """
        # SER sweep
        experiment = ser_vs_snr
        solvers = rcg-ci, gd-ir   # two solvers
        N = 16
        M = 4
        L = 8
        snr_range = 0:5:10
        n_symbols = 20
        master_seed = 7
        record_wall_time = yes
        """
        spec = parse_config(text)
        assert spec.experiment == "ser_vs_snr"
        assert spec.solvers == ["rcg-ci", "gd-ir"]
        assert (spec.n_antennas, spec.n_users, spec.psk_order) == (16, 4, 8)
        assert spec.snr_range == [0.0, 5.0, 10.0]
        assert spec.master_seed == 7
        assert spec.record_wall_time is True

    def test_legacy_solver_alias(self):
        assert parse_config("solvers = CVX-CI").solvers == ["relaxed-ci"]

    def test_unknown_solver_names_line_and_key(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("N = 8\nsolvers = rcg-ci, nosuch\n")
        assert excinfo.value.line_number == 2
        assert excinfo.value.key == "solvers"
        assert "nosuch" in str(excinfo.value)

    def test_unknown_key(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("antennas = 8")
        assert excinfo.value.key == "antennas"

    def test_repeated_key(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("N = 8\nN = 16")
        assert excinfo.value.line_number == 2
        assert "line 1" in str(excinfo.value)

    def test_missing_equals(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("N 8")
        assert excinfo.value.line_number == 1

    def test_missing_value(self):
        with pytest.raises(ConfigParseError):
            parse_config("N =")

    def test_non_integer_count(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("n_symbols = 2.5")
        assert excinfo.value.key == "n_symbols"

    def test_integer_written_as_float(self):
        assert parse_config("N = 32.0").n_antennas == 32

    def test_inconsistent_spec_names_line_and_key(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("N = 8\nL = 2\n")
        assert excinfo.value.line_number == 2
        assert excinfo.value.key == "L"
        assert str(excinfo.value).startswith("line 2, key 'L':")

    def test_channel_model(self):
        spec = parse_config("channel = Identity\nN = 1\nM = 1\n")
        assert spec.channel == "identity"
        assert parse_config("").channel == "random"

    def test_unknown_channel_model(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("channel = rayleigh")
        assert excinfo.value.key == "channel"

    def test_identity_channel_needs_enough_antennas(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("channel = identity\nN = 2\nM = 3\n")
        assert excinfo.value.line_number == 1
        assert excinfo.value.key == "channel"

    def test_identity_channel_checks_every_user_count(self):
        with pytest.raises(ConfigParseError):
            parse_config("experiment = ser_vs_users\nchannel = identity\nN = 8\nM = 2\nM_range = 4, 10\n")

    def test_large_seed_keeps_precision(self):
        assert parse_config("master_seed = 9007199254740993").master_seed == 9007199254740993


class TestSolverOverrides:
    """Test cases for solver.* and ceo.* keys."""

    def test_overrides_reach_configs(self):
        spec = parse_config("solver.max_iters = 200\nsolver.continuation = true\nceo.samples = 50\nceo.smoothing = 0.5")
        solver_cfg, ceo_cfg = build_solver_configs(spec)
        assert solver_cfg.max_iters == 200
        assert solver_cfg.continuation is True
        assert ceo_cfg.samples == 50
        assert ceo_cfg.smoothing == 0.5

    def test_optional_float_override(self):
        solver_cfg, _ = build_solver_configs(parse_config("solver.epsilon = 0.05"))
        assert solver_cfg.epsilon == 0.05

    def test_seed_cannot_be_overridden(self):
        with pytest.raises(ConfigParseError):
            parse_config("solver.seed = 3")

    def test_invalid_override_value(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("ceo.quantile = 2.0")
        assert "quantile" in str(excinfo.value)

    def test_invalid_override_names_line_and_key(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("N = 8\nceo.samples = 50\nsolver.max_iters = 0\n")
        assert excinfo.value.line_number == 3
        assert excinfo.value.key == "solver.max_iters"


class TestRender:
    """Test cases for writing a spec back out."""

    def test_round_trip(self):
        spec = parse_config(
            "experiment = timing\nN = 64\nM_range = 12:4:20\nN_range = 32, 64\n"
            "P_T = 2.5\nsnr_range = 0:0.1:0.3\nsolver.armijo_slope = 0.001\n"
        )
        assert parse_config(render(spec)) == spec

    def test_empty_antenna_range_is_omitted(self):
        assert "N_range" not in render(ExperimentSpec())
