"""Exception hierarchy. Every failure raised by the toolkit derives from MoebiusError."""


class MoebiusError(Exception):
    """Base class for toolkit errors."""


class InadmissibleQuadruple(MoebiusError, ValueError):
    """Some entry occurs three or more times."""


class MetricDomainError(MoebiusError, ValueError):
    """A point pattern the extended-arithmetic conventions do not cover."""


class RadiusNonPositive(MoebiusError, ValueError):
    pass


class CenterIsOmega(MoebiusError, ValueError):
    """Inversion centered at the infinitely remote point."""


class MapUndefinedAt(MoebiusError, ValueError):
    def __init__(self, point, message: str | None = None):
        self.point = point
        super().__init__(message or f"map undefined at {point!r}")


class UndefinedAtOrigin(MapUndefinedAt):
    pass


class TooFewPoints(MoebiusError, ValueError):
    pass


class DegenerateTriple(MoebiusError, ValueError):
    pass


class DimensionMismatch(MoebiusError, ValueError):
    pass


class NonUnitDirection(MoebiusError, ValueError):
    pass


class PoleOnLine(MoebiusError, ValueError):
    pass


class CoincidentPoints(MoebiusError, ValueError):
    pass


class CoincidentPoles(MoebiusError, ValueError):
    pass


class InfinityNotProjectable(MoebiusError, ValueError):
    pass


class NonConvergent(MoebiusError, ArithmeticError):
    pass


class NonAffine(MoebiusError, ArithmeticError):
    pass


class SlopeEstimationFailed(MoebiusError, ArithmeticError):
    pass


class EdgeLiftFailed(MoebiusError, ArithmeticError):
    pass


class NotOrthogonal(MoebiusError, ValueError):
    pass


class MaximizerNotIsolated(MoebiusError, ArithmeticError):
    pass


class CircleDoesNotMeetFiberTwice(MoebiusError, ValueError):
    pass


class ParameterizationFailed(MoebiusError, ArithmeticError):
    pass


class UnknownSuite(MoebiusError, KeyError):
    pass
