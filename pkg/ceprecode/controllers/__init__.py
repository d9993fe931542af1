"""
Controllers package for ceprecode: the command line and the experiment runner.
"""

from .cli_controller import CLIController
from .experiment_controller import ExperimentController, run_experiment

__all__ = ['CLIController', 'ExperimentController', 'run_experiment']
