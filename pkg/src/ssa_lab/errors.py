"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: validation-type failures (bad data,
bad files, bad flags) exit with 1, capability errors (requests outside
the supported size envelope) exit with 2.
"""


class SsaLabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SsaLabError, ValueError):
    """Subsystem layout or matrix shape is inconsistent with the operation."""


class ValidationError(SsaLabError, ValueError):
    """An input violates a state/ensemble invariant (trace, positivity, ...)."""


class CapabilityError(SsaLabError, ValueError):
    """The request is valid but outside the supported size envelope."""


class ParseError(SsaLabError, ValueError):
    """A state or spec file could not be parsed."""


class ConfigError(SsaLabError, ValueError):
    """A configuration value (flag, parameter name, grid spec) is invalid."""
