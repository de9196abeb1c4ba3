"""Closed-form traveling waves of the quintic complex Ginzburg-Landau equation:
construction, phase-diagram classification and residual verification."""

from .analysis import RootSet, ScanConfig, SolutionClass, classify, quartic_roots, scan_region
from .ansatz_a import CaseAResult, period_a, solve_case_a, specialize_h3h5
from .ansatz_b import CaseBResult, constraint35_residual, solve_c5_constraint, solve_case_b, solve_case_b_all
from .elliptic import WpInvariants, WpValue, wp_eval
from .errors import QcgleError, ValidationError
from .params import AuxD, QcgleParams, derive_aux
from .solution import SolutionProfile, field, intensity, intensity_kink, phase, tau
from .verify import ode36_residual, pde_residual, rk4_crosscheck, system_residual, verify_all

__all__ = [
    "AuxD", "CaseAResult", "CaseBResult", "QcgleError", "QcgleParams", "RootSet", "ScanConfig",
    "SolutionClass", "SolutionProfile", "ValidationError", "WpInvariants", "WpValue", "classify",
    "constraint35_residual", "derive_aux", "field", "intensity", "intensity_kink", "ode36_residual",
    "pde_residual", "period_a", "phase", "quartic_roots", "rk4_crosscheck", "scan_region",
    "solve_c5_constraint", "solve_case_a", "solve_case_b", "solve_case_b_all", "specialize_h3h5",
    "system_residual", "tau", "verify_all", "wp_eval",
]
