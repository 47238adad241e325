"""Sparse approximation of exponential sums by Hankel operator reduction."""
from .aak import (
    ConEigenSystem,
    ReductionResult,
    build_system_matrix,
    con_eigen,
    hankel_con_eigen,
    numerator_polynomial,
    polynomial_roots,
    reduce_to_eps,
    reduce_to_K,
    spectrum,
    zeros_in_disc,
)
from .core import (
    ComplexPolynomial,
    ExponentialSum,
    SampleSequence,
    difference,
    evaluate,
    l1_norm_truncated,
    l2_norm,
    sample,
)
from .errors import ExpSumError, NumericalError, ValidationError
from .fit import FitReport, fit_l1, fit_l2
from .prony import PronyOptions, build_hankel, estimate_order, recover

__all__ = [
    "ComplexPolynomial",
    "ConEigenSystem",
    "ExpSumError",
    "ExponentialSum",
    "FitReport",
    "NumericalError",
    "PronyOptions",
    "ReductionResult",
    "SampleSequence",
    "ValidationError",
    "build_hankel",
    "build_system_matrix",
    "con_eigen",
    "difference",
    "estimate_order",
    "evaluate",
    "fit_l1",
    "fit_l2",
    "hankel_con_eigen",
    "l1_norm_truncated",
    "l2_norm",
    "numerator_polynomial",
    "polynomial_roots",
    "recover",
    "reduce_to_K",
    "reduce_to_eps",
    "sample",
    "spectrum",
    "zeros_in_disc",
]
