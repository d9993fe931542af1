"""
Property-based round trip of experiment specs through the configuration format.
"""

from hypothesis import given, settings
from hypothesis import strategies as st

from ceprecode import config
from ceprecode.models.data_models import EXPERIMENTS, ExperimentSpec
from ceprecode.services.config_parser import parse_config, render

positive_floats = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
snrs = st.floats(min_value=-30.0, max_value=60.0, allow_nan=False, allow_infinity=False)
counts = st.integers(min_value=1, max_value=4096)

overrides = st.fixed_dictionaries({}, optional={
    "solver.max_iters": counts,
    "solver.epsilon": positive_floats,
    "solver.continuation": st.booleans(),
    "solver.armijo_slope": st.floats(min_value=1e-6, max_value=0.5),
    "ceo.samples": counts,
    "ceo.quantile": st.floats(min_value=0.01, max_value=0.99),
})

specs = st.builds(
    ExperimentSpec,
    experiment=st.sampled_from(EXPERIMENTS),
    solvers=st.lists(st.sampled_from(config.SOLVER_TAGS), min_size=1, max_size=6, unique=True),
    n_antennas=counts,
    n_users=counts,
    m_range=st.lists(counts, min_size=1, max_size=8),
    n_range=st.lists(counts, max_size=5),
    psk_order=st.integers(min_value=3, max_value=64),
    amplitude=positive_floats,
    power_budget=positive_floats,
    snr_db=snrs,
    snr_range=st.lists(snrs, min_size=1, max_size=10),
    n_symbols=counts,
    trials=counts,
    coherence=counts,
    master_seed=st.integers(min_value=0, max_value=2 ** 63 - 1),
    record_wall_time=st.booleans(),
    solver_overrides=overrides,
    output_path=st.sampled_from(["results", "out/ser run", "/tmp/ceprecode"]),
)


@settings(deadline=None, max_examples=200)
@given(specs)
def test_render_then_parse_is_identity(spec):
    assert parse_config(render(spec)) == spec
