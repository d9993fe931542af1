"""
Key-value experiment configuration.

One ``key = value`` per line, ``#`` starts a comment, lists are
comma-separated and numeric ranges may be written ``start:step:stop``
(inclusive). Solver settings are overridden with ``solver.<field>`` and
``ceo.<field>`` keys, e.g. ``solver.max_iters = 200`` or ``ceo.samples = 100``.

Absent keys take the defaults of ``ExperimentSpec``; ``render`` writes a
spec back in the same format so that ``parse_config(render(spec)) == spec``.
"""

import logging
import math
from dataclasses import fields, replace
from typing import Callable, Dict, List, Optional, Tuple

from .. import config
from ..exceptions import ConfigParseError
from ..models.data_models import EXPERIMENTS, ExperimentSpec
from ..models.solver_models import CeoConfig, SolverConfig

logger = logging.getLogger(__name__)

SOLVER_PREFIX = "solver."
CEO_PREFIX = "ceo."
RANGE_TOL = 1e-9


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        pass
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got '{text}'")
    return int(value)


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got '{text}'")
    return value


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true or false, got '{text}'")


def expand_range(text: str, cast: Callable[[str], float] = _parse_float) -> List:
    """
    Expands ``a:step:b`` (inclusive of b) or a comma list.

    Raises:
        ValueError: If the range is malformed, has a zero step or runs away from b
    """
    text = text.strip()
    if ":" not in text:
        items = [part.strip() for part in text.split(",") if part.strip()]
        if not items:
            raise ValueError("empty list")
        return [cast(item) for item in items]

    parts = [part.strip() for part in text.split(":")]
    if len(parts) != 3:
        raise ValueError(f"range must look like start:step:stop, got '{text}'")
    start, step, stop = (cast(part) for part in parts)
    if step == 0:
        raise ValueError("range step must be non-zero")
    if (stop - start) * step < 0:
        raise ValueError(f"range {text} is empty")
    count = int(math.floor((stop - start) / step + RANGE_TOL)) + 1
    values = [start + k * step for k in range(count)]
    if cast is _parse_int:
        return [int(v) for v in values]
    return [float(v) for v in values]


def _solver_names(text: str) -> List[str]:
    tags = []
    for raw in text.split(","):
        tag = raw.strip().lower()
        if not tag:
            continue
        tag = config.SOLVER_ALIASES.get(tag, tag)
        if tag not in config.SOLVER_TAGS:
            raise ValueError(f"unknown solver '{raw.strip()}' (known: {', '.join(config.SOLVER_TAGS)})")
        tags.append(tag)
    if not tags:
        raise ValueError("at least one solver is required")
    return tags


def _channel_model(text: str) -> str:
    name = text.strip().lower()
    if name not in config.CHANNEL_MODELS:
        raise ValueError(f"unknown channel model '{text.strip()}' (known: {', '.join(config.CHANNEL_MODELS)})")
    return name


def _experiment(text: str) -> str:
    name = text.strip().lower()
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment '{text.strip()}' (known: {', '.join(EXPERIMENTS)})")
    return name


# config key -> (ExperimentSpec field, parser)
SPEC_KEYS: Dict[str, Tuple[str, Callable[[str], object]]] = {
    "experiment": ("experiment", _experiment),
    "solvers": ("solvers", _solver_names),
    "N": ("n_antennas", _parse_int),
    "M": ("n_users", _parse_int),
    "M_range": ("m_range", lambda text: expand_range(text, _parse_int)),
    "N_range": ("n_range", lambda text: expand_range(text, _parse_int)),
    "L": ("psk_order", _parse_int),
    "u": ("amplitude", _parse_float),
    "P_T": ("power_budget", _parse_float),
    "snr_db": ("snr_db", _parse_float),
    "snr_range": ("snr_range", expand_range),
    "n_symbols": ("n_symbols", _parse_int),
    "trials": ("trials", _parse_int),
    "coherence": ("coherence", _parse_int),
    "channel": ("channel", _channel_model),
    "master_seed": ("master_seed", _parse_int),
    "record_wall_time": ("record_wall_time", _parse_bool),
    "output_path": ("output_path", str.strip),
}

# ExperimentSpec field -> config key
FIELD_KEYS = {field_name: key for key, (field_name, _) in SPEC_KEYS.items()}

# Seeds are derived from master_seed and cannot be overridden.
_OVERRIDE_EXCLUDED = ("seed",)


def _override_parsers(cls) -> Dict[str, Callable[[str], object]]:
    parsers = {}
    for f in fields(cls):
        if f.name in _OVERRIDE_EXCLUDED:
            continue
        default = f.default
        if isinstance(default, bool):
            parsers[f.name] = _parse_bool
        elif isinstance(default, int):
            parsers[f.name] = _parse_int
        else:
            parsers[f.name] = _parse_float
    return parsers


OVERRIDE_KEYS: Dict[str, Callable[[str], object]] = {
    **{SOLVER_PREFIX + name: parser for name, parser in _override_parsers(SolverConfig).items()},
    **{CEO_PREFIX + name: parser for name, parser in _override_parsers(CeoConfig).items()},
}


def parse_config(text: str) -> ExperimentSpec:
    """
    Parses configuration text into a validated ExperimentSpec.

    Args:
        text: Configuration file contents

    Returns:
        ExperimentSpec: Spec with defaults for every absent key

    Raises:
        ConfigParseError: On unknown or repeated keys, malformed values or an
            inconsistent spec; the message names the line and key
    """
    values: Dict[str, object] = {}
    overrides: Dict[str, object] = {}
    seen: Dict[str, int] = {}

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError("expected 'key = value'", line_number)

        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigParseError("missing key before '='", line_number)
        if key in seen:
            raise ConfigParseError(f"repeated key (first set on line {seen[key]})", line_number, key)
        seen[key] = line_number
        if not value:
            raise ConfigParseError("missing value", line_number, key)

        if key in SPEC_KEYS:
            field_name, parser = SPEC_KEYS[key]
            target = values
        elif key in OVERRIDE_KEYS:
            field_name, parser = key, OVERRIDE_KEYS[key]
            target = overrides
        else:
            raise ConfigParseError("unknown key", line_number, key)

        try:
            target[field_name] = parser(value)
        except ValueError as e:
            raise ConfigParseError(str(e), line_number, key) from e

    spec = ExperimentSpec(**values, solver_overrides=overrides)
    problems = spec.field_errors()
    if problems:
        field_name, message = problems[0]
        key = FIELD_KEYS[field_name]
        raise ConfigParseError(message, seen.get(key), key)

    solver_cfg, ceo_cfg = build_solver_configs(spec)
    problems = solver_cfg.validate() + ceo_cfg.validate()
    if problems:
        key = _offending_override(overrides)
        raise ConfigParseError("invalid solver override: " + " ".join(problems), seen.get(key), key)

    logger.debug(f"Parsed {spec.experiment} configuration with solvers {', '.join(spec.solvers)}")
    return spec


def _offending_override(overrides: Dict[str, object]) -> Optional[str]:
    """First override that is invalid on its own, else the last one given."""
    for key, value in overrides.items():
        spec = ExperimentSpec(solver_overrides={key: value})
        solver_cfg, ceo_cfg = build_solver_configs(spec)
        if solver_cfg.validate() or ceo_cfg.validate():
            return key
    return next(reversed(list(overrides)), None)


def build_solver_configs(spec: ExperimentSpec) -> Tuple[SolverConfig, CeoConfig]:
    """Applies the experiment's ``solver.*`` and ``ceo.*`` overrides to the default settings."""
    solver_fields = {key[len(SOLVER_PREFIX):]: value for key, value in spec.solver_overrides.items()
                     if key.startswith(SOLVER_PREFIX)}
    ceo_fields = {key[len(CEO_PREFIX):]: value for key, value in spec.solver_overrides.items()
                  if key.startswith(CEO_PREFIX)}
    return replace(SolverConfig(), **solver_fields), replace(CeoConfig(), **ceo_fields)


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(item) for item in value)
    return str(value)


def render(spec: ExperimentSpec) -> str:
    """Writes every field of an ExperimentSpec in configuration format."""
    lines = []
    for key, (field_name, _) in SPEC_KEYS.items():
        value = getattr(spec, field_name)
        if isinstance(value, list) and not value:
            continue
        lines.append(f"{key} = {_format(value)}")
    for key in sorted(spec.solver_overrides):
        lines.append(f"{key} = {_format(spec.solver_overrides[key])}")
    return "\n".join(lines) + "\n"
