"""Exception hierarchy shared by all trapsqueeze modules."""


class TrapSqueezeError(Exception):
    """Base class for every error raised by this package."""


class InvalidState(TrapSqueezeError, ValueError):
    """Covariance matrix is not symmetric, not positive definite or unphysical."""


class UnsupportedDimension(TrapSqueezeError, ValueError):
    """Operation called with the wrong number of modes."""


class UnstableHamiltonian(TrapSqueezeError, ValueError):
    """Quadratic form has a non-positive normal-mode frequency squared."""


class NoSecularWell(TrapSqueezeError, ValueError):
    """Mathieu parameters give a + q**2/2 <= 0, so no pseudo-potential well."""


class InvalidSchedule(TrapSqueezeError, ValueError):
    """Ramp schedule is empty, unordered or contains non-finite values."""


class DivergenceDetected(TrapSqueezeError, ArithmeticError):
    """Propagated covariance matrix blew up.

    Attributes
    ----------
    time : float
        Time (in units of 1/Omega) at which the step that diverged started.
    """

    def __init__(self, time, message=None):
        self.time = float(time)
        super().__init__(message or f"covariance matrix diverged at t = {self.time:g}")


class UnknownPreset(TrapSqueezeError, KeyError):
    """Preset name not found in the catalog."""

    def __init__(self, name, catalog):
        self.name = name
        self.catalog = tuple(catalog)
        super().__init__(name)

    def __str__(self):
        return f"unknown preset {self.name!r}; available: {', '.join(self.catalog)}"


class ConfigError(TrapSqueezeError, ValueError):
    """Run configuration could not be parsed or violates an invariant."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
