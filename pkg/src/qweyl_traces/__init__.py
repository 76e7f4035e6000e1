"""Twisted traces on generalized q-Weyl algebras."""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    InconsistencyError,
    NoPositiveTraceError,
    NotInSubalgebraError,
    PoleError,
    QWeylError,
    ResonanceError,
    WrongRegimeError,
)
from .laurent import LaurentPoly
from .qweyl import AlgebraElement, AlgebraParams, ConjugationParams, from_word, multiply
from .special import ThetaParams, WeierstrassParams, WeightParams, theta, weight_w
from .trace_alg import TraceSpec, gram_matrix, trace_eval
from .trace_analytic import GeneralTraceSpec, analytic_trace, general_trace_eval, root_shift

__all__ = [
    "AlgebraElement", "AlgebraParams", "ConfigurationError", "ConjugationParams",
    "ConvergenceError", "DomainError", "GeneralTraceSpec", "InconsistencyError",
    "LaurentPoly", "NoPositiveTraceError", "NotInSubalgebraError", "PoleError",
    "QWeylError", "ResonanceError", "ThetaParams", "TraceSpec", "WeierstrassParams",
    "WeightParams", "WrongRegimeError", "analytic_trace", "from_word",
    "general_trace_eval", "gram_matrix", "multiply", "root_shift", "theta",
    "trace_eval", "weight_w",
]
