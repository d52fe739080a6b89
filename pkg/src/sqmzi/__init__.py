"""Squeezed-light-enhanced Mach-Zehnder atom interferometry:
truncated-Wigner Monte Carlo plus exact Gaussian analytics."""

from .analytics import (
    AnalyticInput,
    scheme1_optimal_r,
    scheme1_sensitivity,
    scheme2_sensitivity,
    scheme3_sensitivity,
)
from .dynamics import CouplingSchedule, PhysicalParams, analytic_qst, coupling_from_physical
from .errors import NumericalFailure, ValidationError
from .estimators import MomentSet, SensitivityResult, corrected_j_moments, corrected_number_moments
from .network import LocalOscillator, LossSpec
from .runner import RunResult, SchemeConfig, reproduce_table1, run_scheme, sweep
from .sampler import SqueezeSpec, TrajectoryEnsemble

__all__ = [
    "AnalyticInput", "CouplingSchedule", "LocalOscillator", "LossSpec",
    "MomentSet", "NumericalFailure", "PhysicalParams", "RunResult",
    "SchemeConfig", "SensitivityResult", "SqueezeSpec", "TrajectoryEnsemble",
    "ValidationError", "analytic_qst", "corrected_j_moments",
    "corrected_number_moments", "coupling_from_physical", "reproduce_table1",
    "run_scheme", "scheme1_optimal_r", "scheme1_sensitivity",
    "scheme2_sensitivity", "scheme3_sensitivity", "sweep",
]
