"""
Tau optimization sweeps and the evaluation suites.
"""

from .tau_search import (
    TauOptResult,
    TauObjective,
    SweepConfig,
    golden_section_log,
    find_optimal_tau,
    build_sweep_configs,
    run_config,
    sweep_optimal_tau,
)
from .evaluator import Evaluator, EvaluationResult, TauMode

__all__ = [
    'TauOptResult',
    'TauObjective',
    'SweepConfig',
    'golden_section_log',
    'find_optimal_tau',
    'build_sweep_configs',
    'run_config',
    'sweep_optimal_tau',
    'Evaluator',
    'EvaluationResult',
    'TauMode',
]
