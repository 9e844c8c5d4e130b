"""Exception types raised across the package."""


class DamekRicciError(Exception):
    """Base class for all package errors."""


class UnsupportedDimension(DamekRicciError, ValueError):
    pass


class InvalidGenerators(DamekRicciError, ValueError):
    pass


class DimensionMismatch(DamekRicciError, ValueError):
    pass


class NotApplicable(DamekRicciError, ValueError):
    pass


class DomainError(DamekRicciError, ValueError):
    pass


class PoleAtTheta(DamekRicciError, ZeroDivisionError):
    """The prolonged geodesic passes through a point at infinity here."""


class DegenerateRange(DamekRicciError, ValueError):
    pass


class OutsideBall(DamekRicciError, ValueError):
    pass


class NoMinimum(DamekRicciError, ValueError):
    pass


class ConvergenceFailure(DamekRicciError, RuntimeError):
    pass


class InvalidFreeParameters(DamekRicciError, ValueError):
    pass


class SubspaceViolation(DamekRicciError, ValueError):
    pass


class ConfigError(DamekRicciError, ValueError):
    pass
