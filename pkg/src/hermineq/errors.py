"""Exception hierarchy shared by every module."""


class LabError(Exception):
    """Base class for all errors raised by hermineq."""


class NotHermitian(LabError, ValueError):
    pass


class NoConvergence(LabError, RuntimeError):
    pass


class BadRank(LabError, ValueError):
    pass


class DimensionMismatch(LabError, ValueError):
    pass


class MalformedMatrix(LabError, ValueError):
    """Serialized matrix has inconsistent shape or non-finite entries."""


class OutOfDomain(LabError, ValueError):
    pass


class SpectrumOutOfDomain(OutOfDomain):
    pass


class NotAdmissible(LabError, ValueError):
    pass


class NotInvertible(LabError, ValueError):
    pass


class NotPSD(LabError, ValueError):
    pass


class NotContraction(LabError, ValueError):
    pass


class NotExpansive(LabError, ValueError):
    pass


class NotIsometricColumn(LabError, ValueError):
    pass


class DominanceFails(LabError, ValueError):
    pass


class ConstructionFailed(LabError, RuntimeError):
    """A constructive certificate did not verify; indicates a numerics bug."""


class HypothesisViolated(LabError, ValueError):
    pass


class DomainTooSmall(LabError, ValueError):
    pass


class GenericityFailed(LabError, ValueError):
    pass


class UnknownStatement(LabError, KeyError):
    pass


class SchemaError(LabError, ValueError):
    pass
