"""Exception types raised by the simulator."""


class MmwsimError(Exception):
    """Base class for all simulator errors."""


class ParameterError(MmwsimError, ValueError):
    """A model parameter is outside its valid domain."""


class EmptyTraceError(ParameterError):
    """A trace was requested for a zero-length horizon."""


class GeometryError(MmwsimError, ValueError):
    """UE placement or AP-UE distance is invalid."""


class SchedulingError(MmwsimError, RuntimeError):
    """A scheduler was invoked without the inputs it needs."""


class ConfigError(MmwsimError, ValueError):
    """A configuration file could not be parsed or validated."""
