"""Exception hierarchy shared by all modules.

Each class carries the process exit code the command-line front end uses
when the error escapes a subcommand: 2 for bad input, 3 for numeric failure.
"""


class QWeylError(Exception):
    """Base class for every error raised by this package."""

    kind = "error"
    exit_code = 3


class DomainError(QWeylError, ValueError):
    """An argument lies outside the domain of an operation (e.g. z = 0)."""

    kind = "domain"
    exit_code = 2


class ConfigurationError(QWeylError, ValueError):
    """Parameters violate a structural precondition."""

    kind = "configuration"
    exit_code = 2


class NotInSubalgebraError(DomainError):
    """Element has negative Z-exponents but the positive part was required."""

    kind = "not-in-subalgebra"


class WrongRegimeError(ConfigurationError):
    """Roots of P are not in the regime an operation supports."""

    kind = "wrong-regime"


class NoPositiveTraceError(ConfigurationError):
    """No positive trace exists for the requested parameters."""

    kind = "no-positive-trace"


class ResonanceError(QWeylError, ArithmeticError):
    """t = q^(-2k) for an exponent k that had to be inverted."""

    kind = "resonance"

    def __init__(self, k, detail=None):
        self.k = k
        super().__init__(detail or f"resonant exponent k={k}: 1 - t q^(2k) vanishes")


class PoleError(QWeylError, ArithmeticError):
    """Evaluation point too close to a pole."""

    kind = "pole"

    def __init__(self, detail, location=None):
        self.location = location
        super().__init__(detail)


class ConvergenceError(QWeylError, ArithmeticError):
    """An iterative method failed to converge."""

    kind = "convergence"


class InconsistencyError(QWeylError, ArithmeticError):
    """A computed object fails a consistency check it must satisfy."""

    kind = "inconsistency"
