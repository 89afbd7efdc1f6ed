"""Error types raised by the package; each carries the CLI exit code it maps to."""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PROPERTY = 2
EXIT_RESOURCE = 3


class DipoleKakeyaError(Exception):
    exit_code: int = EXIT_VALIDATION

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InvalidParameterError(DipoleKakeyaError):
    """A numeric or structural precondition of an operation does not hold."""


class StageMismatchError(DipoleKakeyaError):
    """The requested stage is not available in a construction state."""


class LineageError(DipoleKakeyaError):
    """A construction-B state was built without the lineage a query needs."""


class CoverageError(DipoleKakeyaError):
    """Direction coverage is too sparse for the requested operation."""


class ResourceCapError(DipoleKakeyaError):
    exit_code = EXIT_RESOURCE


class PropertyCheckError(DipoleKakeyaError):
    exit_code = EXIT_PROPERTY


class UnitPairRejection(DipoleKakeyaError):
    """Two points are not at unit distance within tolerance."""

    def __init__(self, distance: float, tol: float):
        super().__init__(
            f"Points are at distance {distance!r}, not 1 within tolerance {tol!r}."
        )
        self.distance = distance
        self.tol = tol
