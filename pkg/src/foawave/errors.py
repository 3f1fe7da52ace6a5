"""Exception types raised across the package."""


class FoaError(Exception):
    """Base class for every error raised by foawave."""


class OutOfDomain(FoaError):
    pass


class GridMismatch(FoaError):
    pass


class NonMonotonicTime(FoaError):
    pass


class Unstable(FoaError):
    """Explicit time step exceeds the scheme's stability bound."""


class SolverDiverged(FoaError):
    pass


class Degenerate(FoaError):
    pass


class OutsideLightCone(FoaError):
    pass


class SingularOrigin(FoaError):
    pass


class NonpositiveTime(FoaError):
    pass


class SingularEvaluation(FoaError):
    pass


class EmptyTrajectory(FoaError):
    pass


class EmptyInput(FoaError):
    pass


class DegenerateMap(FoaError):
    pass


class EmptyFixations(FoaError):
    pass


class PathTooShort(FoaError):
    pass


class MalformedHeader(FoaError):
    pass


class TruncatedData(FoaError):
    pass


class UnsupportedMaxval(FoaError):
    pass


class MissingColumn(FoaError):
    pass


class UnparsableRow(FoaError):
    def __init__(self, row, message):
        super().__init__(f"row {row}: {message}")
        self.row = row


class MissingGroundTruth(FoaError):
    pass


class ConfigError(FoaError):
    pass


class MalformedData(FoaError):
    pass
