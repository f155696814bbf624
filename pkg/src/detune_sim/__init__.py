"""Collective large-detuning dynamics of atom ensembles coupled to a cavity.

The coupling of ``N`` identical atoms to one cavity mode is enhanced to
``sqrt(N) g``, so suppressing real atom-cavity energy exchange needs
``Delta >> sqrt(N) g`` rather than ``Delta >> g``. This package provides
the Hamiltonians, exact propagators, dissipative simulations and threshold
analysis to check that statement numerically.
"""

__version__ = "0.1.0"

from .analysis import (
    ConditionReport,
    SweepResult,
    SweepSpec,
    condition_report,
    effective_fidelity,
    min_detuning,
    scaling_exponent,
    sweep,
)
from .dissipative import DecayModel, simulate_collective_decay, simulate_full_lindblad
from .models import LambdaParams, TwoLevelParams
from .propagators import (
    lambda_nonresonant_exact,
    lambda_nonresonant_perturbative,
    lambda_resonant_u,
    max_leakage_two_level,
    reduce_variables,
    two_level_u,
)
from .trajectory import Trajectory

__all__ = [
    "ConditionReport", "DecayModel", "LambdaParams", "SweepResult", "SweepSpec",
    "Trajectory", "TwoLevelParams", "condition_report", "effective_fidelity",
    "lambda_nonresonant_exact", "lambda_nonresonant_perturbative", "lambda_resonant_u",
    "max_leakage_two_level", "min_detuning", "reduce_variables", "scaling_exponent",
    "simulate_collective_decay", "simulate_full_lindblad", "sweep", "two_level_u",
]
