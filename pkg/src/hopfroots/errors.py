"""Exception hierarchy shared by every module of the package."""


class HopfRootsError(Exception):
    """Base class for all package errors."""


class DegenerateInput(HopfRootsError, ValueError):
    pass


class PoleProximity(HopfRootsError, ValueError):
    pass


class DomainMismatch(HopfRootsError, TypeError):
    """Composition or evaluation across incompatible space tags."""


class NonSmoothPoint(HopfRootsError, ValueError):
    pass


class ParityError(HopfRootsError, ValueError):
    pass


class IrregularValue(HopfRootsError):
    """A preimage of the requested value has a near-singular differential."""


class IrregularPoint(HopfRootsError):
    pass


class CriticalValueSearchFailed(HopfRootsError):
    pass


class UnstableCount(HopfRootsError):
    pass


class CorrectorDiverged(HopfRootsError):
    pass


class SingularCurvePoint(HopfRootsError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class OpenOrTooLong(HopfRootsError):
    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = curve


class CurvesNotSeparated(HopfRootsError):
    pass


class ProjectionFailure(HopfRootsError):
    pass


class ClassificationMismatch(HopfRootsError):
    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class DecompositionOverlap(HopfRootsError):
    pass


class TheoremCheckFailed(HopfRootsError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
