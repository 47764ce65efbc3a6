"""Error hierarchy shared by all modules.

Each class maps to a distinct CLI exit code so scripted callers can tell
bad configuration apart from blown resource caps or accuracy failures.
"""


class GdnlsError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigurationError(GdnlsError):
    """Invalid parameters, grids, or preconditions."""

    exit_code = 2


class ResourceError(GdnlsError):
    """A depth/size cap or memory guard was exceeded."""

    exit_code = 3


class AccuracyError(GdnlsError):
    """Detected loss of accuracy: support clipping, divergence, blow-up."""

    exit_code = 4
