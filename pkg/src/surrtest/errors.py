"""Exception types raised by the library.

Every failure mode has a named class so callers (and the CLI exit-code
mapping) can distinguish data problems from configuration problems.
"""


class SurrtestError(Exception):
    """Base class for all library errors."""


class DataError(SurrtestError):
    """Malformed or inconsistent input data."""


class ConfigError(SurrtestError):
    """Invalid configuration or parameter value."""


class MissingColumn(DataError):
    """A required CSV column is absent."""


class NonFiniteValue(DataError):
    """NaN or infinity encountered where a finite number is required."""


class MixedOutcomePresence(DataError):
    """Within one arm, some outcome cells are blank and some are not."""


class EmptyArm(DataError):
    """A treatment arm has no observations."""


class InvalidTreatmentCode(DataError):
    """Treatment indicator outside {0, 1}."""


class MissingPriorOutcome(DataError):
    """The prior study's control arm lacks outcome values."""


class MissingOutcome(DataError):
    """An operation needs outcome values the arm does not carry."""


class NonPositiveBandwidth(ConfigError):
    """Bandwidth must be strictly positive and finite."""


class DegenerateSpread(DataError):
    """Sample standard deviation or IQR is zero; no bandwidth exists."""


class OutOfSupport(SurrtestError):
    """Kernel neighborhood around a query point carries no mass.

    Raised only under the Error out-of-bounds policy; carries the offending
    query indices when the failure happened inside a vectorized evaluation.
    """

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


class ZeroDenominator(SurrtestError):
    """Division by a zero quantity (for example a zero reference estimate)."""


class ZeroSE(SurrtestError):
    """A test statistic cannot be formed from a zero standard error."""


class UnknownSetting(ConfigError):
    """Simulation setting identifier outside 1..8."""


class NonPositiveDelta0(ConfigError):
    """The lognormal benchmark's effect parameter must be positive."""
