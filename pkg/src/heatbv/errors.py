"""Exception hierarchy shared across the library and the CLI exit codes."""


class HeatBVError(Exception):
    """Base class for all library errors."""


class ConfigError(HeatBVError):
    """Invalid configuration, flags, or operation parameters. CLI exit code 2."""


class CapacityError(HeatBVError):
    """Vertex count exceeds the dense-eigendecomposition budget. CLI exit code 3."""


class NumericError(HeatBVError):
    """A numerical routine failed to converge or produced an inconsistent result. CLI exit code 4."""


class InvariantViolation(HeatBVError):
    """A structural invariant of a constructed object does not hold. CLI exit code 5."""
