"""Exception hierarchy shared by all rotorspin modules."""


class RotorSpinError(Exception):
    """Base class for all rotorspin errors."""


class InvalidArgumentError(RotorSpinError, ValueError):
    """A caller violated a documented precondition."""


class RegimeError(RotorSpinError):
    """Parameters are outside the validity regime of an approximate model."""


class DivergenceError(RotorSpinError):
    """A closed-form expression diverges at the requested parameters."""


class NumericFailureError(RotorSpinError):
    """A numerical procedure failed to converge or lost accuracy."""


class TrackingError(RotorSpinError):
    """Branch tracking across a sweep could not be resolved."""


class NoCrossingError(RotorSpinError):
    """The searched window contains no avoided crossing."""


class FlatTraceError(RotorSpinError):
    """A population trace shows no oscillation above the contrast floor."""


class DegeneracyError(RotorSpinError):
    """Two quasi-energy branches are exactly degenerate and cannot be separated."""


class ConfigError(RotorSpinError):
    """A configuration file or CLI flag is invalid."""
