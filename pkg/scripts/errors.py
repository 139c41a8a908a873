"""
Exception hierarchy for the geodesic saliency toolkit.

Each failure class the CLI distinguishes gets its own type so the
orchestrator can map it to an exit code.
"""


class GeoSalError(Exception):
    """Base class for all toolkit errors."""


class ImageIOError(GeoSalError):
    """Raster could not be read or written."""


class ImageReadError(ImageIOError):
    """File missing, unreadable, or not a decodable raster."""


class ImageWriteError(ImageIOError):
    """Destination not writable."""


class UnsupportedFormatError(ImageIOError):
    """File extension has no registered raster reader/writer."""


class DimensionMismatchError(GeoSalError, ValueError):
    """Two rasters that must align have different sizes."""


class EmptySeedSetError(GeoSalError, ValueError):
    """Distance transform requested with no ground pixels."""


class InvalidSeedError(GeoSalError, ValueError):
    """Seed outside the image or duplicated."""


class OversizeGraphError(GeoSalError, ValueError):
    """Input too large for the brute-force oracle."""


class ParameterError(GeoSalError, ValueError):
    """Tunnel / cut / run parameters failed validation."""


class DatasetError(GeoSalError):
    """Dataset directory missing, empty, or unwritable."""
