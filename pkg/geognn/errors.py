"""Exception and warning types shared across geognn."""


class GeoGnnError(Exception):
    """Base class for all geognn errors."""


class ConfigError(GeoGnnError):
    """Invalid run configuration; `field` is the dotted path of the culprit."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class EigenSolverError(GeoGnnError):
    """Eigensolver failed to converge or residuals exceed tolerance."""

    def __init__(self, message: str, residuals=None):
        self.residuals = residuals
        super().__init__(message)


class StaleCacheError(GeoGnnError):
    """A forward cache no longer matches the architecture parameters."""


class TrainingDivergedError(GeoGnnError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"Non-finite loss {loss!r} at epoch {epoch}")


class OffFormatError(GeoGnnError):
    """Base class for OFF parsing errors; `line` is 1-based."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MalformedHeaderError(OffFormatError):
    pass


class CountMismatchError(OffFormatError):
    pass


class NonNumericError(OffFormatError):
    pass


class DisconnectedGraphWarning(UserWarning):
    """A built graph has more than one connected component."""


class TruncationWarning(UserWarning):
    """A spectrum or requested size was truncated or clamped."""


class SoftAssertionWarning(UserWarning):
    """A soft acceptance check failed at a single grid point."""


__all__ = [
    "GeoGnnError",
    "ConfigError",
    "EigenSolverError",
    "StaleCacheError",
    "TrainingDivergedError",
    "OffFormatError",
    "MalformedHeaderError",
    "CountMismatchError",
    "NonNumericError",
    "DisconnectedGraphWarning",
    "TruncationWarning",
    "SoftAssertionWarning",
]
