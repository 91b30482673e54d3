"""Exception types shared across the workbench.

The split matters for the CLI: bad input (wrong arity, unbalanced weights,
malformed JSON) exits with a usage error, while a computation that starts but
cannot finish (Newton stall, degenerate crossing) is reported as a numeric
failure.
"""


class FloerbenchError(Exception):
    """Base class for everything raised on purpose by this package."""


class InvalidInput(FloerbenchError, ValueError):
    """The request itself is malformed (arity, normalization, schema...)."""


class InvalidArity(InvalidInput):
    pass


class UnbalancedWeights(InvalidInput):
    """Outgoing weight does not equal the sum of incoming weights."""


class WeightMismatch(InvalidInput):
    """Gluing requested along an end whose weights disagree."""


class SingularPoint(InvalidInput):
    """Evaluation requested at (or numerically on top of) a puncture."""


class NumericFailure(FloerbenchError, RuntimeError):
    """An iteration failed to converge; carries a residual report."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateCrossing(NumericFailure):
    """A crossing is non-isolated or signature-degenerate beyond the
    perturbation budget; carries the offending parameter location."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class OrderDegenerate(FloerbenchError):
    """A total order was requested but the data has exact ties."""

    def __init__(self, message, ties=()):
        super().__init__(message)
        self.ties = tuple(ties)
