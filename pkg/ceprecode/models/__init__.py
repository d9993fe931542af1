"""
Data models for the ceprecode package.
"""

from .data_models import (
    ChannelMatrix,
    SymbolVector,
    NoiseModel,
    TrialResult,
    SerResult,
    TimingResult,
    ExperimentSpec,
)
from .geometry import RealPoint, TangentVector, CirclePoint
from .solver_models import (
    RotatedChannel,
    ObjectiveEval,
    SolverConfig,
    CeoConfig,
    PhaseVector,
    TracePoint,
    SolveReport,
)

__all__ = [
    'ChannelMatrix', 'SymbolVector', 'NoiseModel', 'TrialResult', 'SerResult', 'TimingResult', 'ExperimentSpec',
    'RealPoint', 'TangentVector', 'CirclePoint',
    'RotatedChannel', 'ObjectiveEval', 'SolverConfig', 'CeoConfig', 'PhaseVector',
    'TracePoint', 'SolveReport',
]
