"""Exception types shared across the package."""


class StokesLayerError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(StokesLayerError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateCurveError(StokesLayerError):
    """Curve parametrization has (near-)vanishing speed or non-monotone arc length."""


class SelfIntersectionError(StokesLayerError):
    """Distinct nodes coincide, or the arc-chord functional is not finite."""


class NearSingularEvaluationError(StokesLayerError):
    """Off-curve evaluation point too close to the curve for plain quadrature."""


class CharacteristicCrossingError(StokesLayerError):
    """Label-to-position map lost monotonicity (discretization failure)."""


class ConfigError(StokesLayerError):
    """Run configuration is malformed; message names the offending key."""


class RunIOError(StokesLayerError):
    """Snapshot output could not be written; run aborted with partial output."""


class StopCondition(StokesLayerError):
    """A run-terminating numerical monitor fired.

    Attributes:
        reason: machine-readable reason code string.
        diagnostics: Diagnostics record at the stopping state (may be None).
    """

    reason = "stopped"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class PositivityStop(StopCondition):
    reason = "h_positivity"


class ArcChordStop(StopCondition):
    reason = "arc_chord"


class NonFiniteStop(StopCondition):
    reason = "non_finite"


class EnergyCeilingStop(StopCondition):
    reason = "energy_ceiling"
