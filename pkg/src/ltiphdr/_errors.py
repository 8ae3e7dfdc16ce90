from __future__ import annotations

__all__ = [
    "ConfigError",
    "DomainError",
    "DorfError",
    "ExposureTimeError",
    "FusionError",
    "ImageIOError",
    "LtipError",
    "LutError",
    "ShapeError",
]


class LtipError(Exception):
    """Base class for all errors raised by ltiphdr."""


class DomainError(LtipError, ValueError):
    """A value lies outside the domain of an algebra."""


class LutError(LtipError):
    """A look-up table cannot meet its error bound."""

    def __init__(self, message: str, measured_error: float | None = None) -> None:
        super().__init__(message)
        self.measured_error = measured_error


class FusionError(LtipError, ValueError):
    """Frames or weights cannot be fused as given."""


class ExposureTimeError(LtipError, ValueError):
    """Exposure times are missing, invalid or violate an assumption."""


class DorfError(LtipError):
    """A response-function database cannot be read."""


class ImageIOError(LtipError):
    """An image file cannot be decoded or encoded."""


class ConfigError(LtipError, ValueError):
    """A configuration key or value is invalid."""


class ShapeError(LtipError, ValueError):
    """Images that must match in size do not."""
