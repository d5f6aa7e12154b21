"""Exception hierarchy shared across the package.

Three categories matter to callers (and map to distinct CLI exit codes):
bad configuration or parameter domains, bad data, and solver breakdown.
"""


class GtispError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(GtispError, ValueError):
    """A parameter is outside its admissible domain (e.g. SCAD a <= 2)."""


class DataError(GtispError, ValueError):
    """Input data violates a contract (support, dimensions, degeneracy)."""


class SolverFailure(GtispError, RuntimeError):
    """The iteration diverged or a smooth sub-solve could not converge."""
