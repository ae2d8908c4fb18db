"""Continuous-ell deformations of the Darboux-Poeschl-Teller and radial
oscillator systems, with numerical verification of their identities."""
from .classical import Model, Params
from .errors import (ConvergenceError, DomainError, DptellError, ParameterError, PoleError,
                     QuadratureError)
from .limit import jacobi_to_laguerre_limit
from .numerics import VerificationReport
from .spectra import DeformedSystem, deformed_system
from .suite import SuiteConfig, run_invariant_suite

__version__ = "0.1.0"

__all__ = [
    "Model", "Params", "DeformedSystem", "deformed_system", "VerificationReport",
    "SuiteConfig", "run_invariant_suite", "jacobi_to_laguerre_limit",
    "DptellError", "DomainError", "ParameterError", "PoleError", "ConvergenceError",
    "QuadratureError",
]
