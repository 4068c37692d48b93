"""Exception hierarchy shared by all sinhlab modules."""


class SinhLabError(Exception):
    """Base class for every error raised by sinhlab."""


# kernels / geometry
class OutOfDomain(SinhLabError):
    pass


class Singularity(SinhLabError):
    pass


class SeriesNotConverged(SinhLabError):
    pass


class MeshTooCoarse(SinhLabError):
    pass


class ResolutionInvalid(SinhLabError):
    pass


# configurations and critical points
class PointsTooClose(SinhLabError):
    pass


class NoConvergence(SinhLabError):
    pass


class LeftDomain(SinhLabError):
    pass


class TooCloseToPeak(SinhLabError):
    pass


class RhoTooLarge(SinhLabError):
    pass


# nonlinear solves
class NewtonDiverged(SinhLabError):
    pass


class JacobianSingular(SinhLabError):
    pass


class ContinuationBroken(SinhLabError):
    def __init__(self, rho, cause=None):
        self.rho = rho
        self.cause = cause
        msg = f"continuation broke at rho={rho!r}"
        if cause is not None:
            msg += f": {cause}"
        super().__init__(msg)


# spectra
class ExponentOverflow(SinhLabError):
    pass


class EigSolverFailure(SinhLabError):
    pass


class ZeroField(SinhLabError):
    pass


class SpectrumTruncated(SinhLabError):
    pass


# verification harness
class InsufficientSamples(SinhLabError):
    pass


class InsufficientData(SinhLabError):
    pass


class RegimeMismatch(SinhLabError):
    pass


class MissingFits(SinhLabError):
    pass


class QuadratureFailure(SinhLabError):
    pass


class BallNotAdmissible(SinhLabError):
    pass


class IncompleteRuns(SinhLabError):
    pass


class ConfigError(SinhLabError):
    pass


class StageError(SinhLabError):
    """Wraps a failure inside one pipeline stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
