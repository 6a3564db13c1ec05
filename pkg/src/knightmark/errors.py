"""Exception hierarchy.

Input problems derive from :class:`InputError` (the CLI maps them to exit
code 2).  Analysis outcomes that block a computation, such as an unbounded
superhedge, derive from :class:`AnalysisError` and carry the certificate
that explains them.
"""


class KnightmarkError(Exception):
    pass


class InputError(KnightmarkError):
    pass


class SchemaError(InputError):
    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class RationalParseError(InputError):
    pass


class MarketError(InputError):
    pass


class RefinementError(MarketError):
    pass


class AdaptednessError(MarketError):
    pass


class NegativePriceError(MarketError):
    pass


class MeasurabilityError(MarketError):
    pass


class EmptyPriorSet(InputError):
    pass


class NonProbabilityVector(InputError):
    pass


class InvalidRelevance(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class OrderUnsupported(KnightmarkError):
    """The operation needs a lattice of negligible claims (state-based order)."""


class BadZ(InputError):
    pass


class BadR(InputError):
    pass


class AnalysisError(KnightmarkError):
    pass


class UnboundedBelow(AnalysisError):
    """Superhedge price is minus infinity; ``certificate`` is the improving ray."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class EmptyPolytope(AnalysisError):
    pass


class EmptySupport(AnalysisError):
    pass


class ArbitragePresent(AnalysisError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class DiagnosticLimit(AnalysisError):
    pass


class InternalInconsistency(KnightmarkError):
    """Two independent computations that must agree did not."""
