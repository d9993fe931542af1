"""
Service layer components for ceprecode.
"""

from .baselines import run_solver
from .error_handler import ErrorHandler
from .simulator import MonteCarloSimulator
from .solver import rcg_solve

__all__ = ['ErrorHandler', 'MonteCarloSimulator', 'rcg_solve', 'run_solver']
