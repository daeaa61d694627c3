"""Exception hierarchy shared by every module of the package."""


class WmiError(Exception):
    """Base class for all errors raised by dnfwmi."""


class InstanceSyntaxError(WmiError):
    """Malformed instance document. ``position`` is a JSON path or char offset."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class InstanceSemanticError(WmiError):
    """Well-formed document describing an invalid formula or weight."""


class WeightDomainError(WmiError):
    """A weight function produced a negative value or exceeded its envelope."""


class ConfigurationError(WmiError):
    """Invalid solver, generator or weight configuration."""


class BudgetInfeasibleError(ConfigurationError):
    """The trial-count denominator is not positive."""


class OracleMismatchError(ConfigurationError):
    """An oracle was asked to handle a clause shape it does not support."""


class NumericalDegeneracyError(WmiError):
    """A linear program failed to converge."""


class DegenerateChordError(WmiError):
    """A hit-and-run chord has (near) zero length."""


class SamplerStuckError(WmiError):
    """Too many consecutive degenerate chords."""


class NoSampleError(WmiError):
    """Sampling was requested from a clause with an empty region."""


class ZeroCoverageError(WmiError):
    """A coverage estimator finished with zero successful checks."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class DeadlineExceeded(WmiError):
    """A run hit its wall-clock deadline."""
