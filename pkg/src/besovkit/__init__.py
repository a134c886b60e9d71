"""Numerical toolkit for weighted Besov-type seminorms, Schwarzian operators and Beltrami coefficients."""

from .errors import (BesovKitError, BranchError, CriticalPointError, DomainError, FiberError, HypothesisError,
                     KindDomainError, PoleError, SupportError, UnknownName, UsageError)
from .function_model import Domain, HoloFunction, Jet2, eval_jet, gallery, parse_function_spec
from .quadrature import QuadratureConfig, SeminormValue
from .report import Check, VerificationReport, emit_report, parse_report
from .seminorms import SeminormKind, seminorm

__version__ = "0.1.0"

__all__ = [
    "BesovKitError", "BranchError", "CriticalPointError", "DomainError", "FiberError", "HypothesisError",
    "KindDomainError", "PoleError", "SupportError", "UnknownName", "UsageError",
    "Domain", "HoloFunction", "Jet2", "eval_jet", "gallery", "parse_function_spec",
    "QuadratureConfig", "SeminormValue", "Check", "VerificationReport", "emit_report", "parse_report",
    "SeminormKind", "seminorm",
]
