"""Exception types shared across the package."""


class BhphaseError(Exception):
    """Base class for all package errors."""


class InvalidModel(BhphaseError):
    """A lattice model violates one of its structural constraints."""


class InvalidMask(BhphaseError):
    """A drive mask is ragged, non-binary, or otherwise unreadable."""


class InvalidArgument(BhphaseError):
    """An operation was called with an out-of-range argument."""


class ResourceLimit(BhphaseError):
    """A run would exceed a configured memory or dimension cap."""


class NotSteady(BhphaseError):
    """The steady-state detector has not fired where a steady state is required."""


class GeometryMismatch(BhphaseError):
    """An estimator needs lattice geometry the model does not carry."""


class LowSignal(BhphaseError):
    """Occupation is too low relative to sampling noise for a reliable estimate."""


class ConventionUnresolved(BhphaseError):
    """The stored analytic-solution convention constants failed their self-check."""


class NoConvergence(BhphaseError):
    """An iterative computation exhausted its budget without converging."""


class CutoffInsufficient(BhphaseError):
    """A Fock-space cutoff holds non-negligible population at the solution."""


class DimensionCap(BhphaseError):
    """A requested Fock space exceeds the configured dimension cap."""


class ConfigError(BhphaseError):
    """A run configuration file is malformed or contains unknown keys."""
