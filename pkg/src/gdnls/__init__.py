"""Numerical laboratory for norm inflation in the gauged derivative NLS."""

__version__ = "0.1.0"

from .errors import AccuracyError, ConfigurationError, GdnlsError, ResourceError

__all__ = [
    "AccuracyError",
    "ConfigurationError",
    "GdnlsError",
    "ResourceError",
    "__version__",
]
