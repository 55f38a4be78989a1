"""Exception types raised by the construction and verification routines."""


class LagSurgeryError(Exception):
    """Base class for all errors raised by this package."""


class ProjectionOutsideChart(LagSurgeryError):
    pass


class OutsidePolytopeInterior(LagSurgeryError):
    pass


class DegenerateJacobian(LagSurgeryError):
    pass


class OpenBoundary(LagSurgeryError):
    pass


class NonManifoldMesh(LagSurgeryError):
    pass


class TangencyUnresolved(LagSurgeryError):
    pass


class AngleMismatch(LagSurgeryError):
    pass


class ContainmentViolation(LagSurgeryError):
    pass


class BaseOffCircle(LagSurgeryError):
    pass


class TransitionInconsistent(LagSurgeryError):
    pass


class InadmissibleParameters(LagSurgeryError):
    pass


class DegenerateParameter(LagSurgeryError):
    pass


class NoRoot(LagSurgeryError):
    pass


class BoundaryMismatch(LagSurgeryError):
    pass


class ChartOverflow(LagSurgeryError):
    pass


class SamplingTooCoarse(LagSurgeryError):
    pass


class NotLagrangianPlane(LagSurgeryError):
    pass
