"""
Exception hierarchy. Every error formats its message from a `__desc__` template and
carries the process exit code the command line reports for it.
"""
from typing import Any


class MultiCoapError(Exception):
    """
    Root of all errors raised by the package.
    """

    __name__ = "MultiCoapError"
    __desc__ = "{}"
    exit_code: int = 1

    def __init__(self, *args: Any, **kwargs) -> None:
        self.message = self.__desc__.format(*args)
        super().__init__(self.message, **kwargs)


class ConfigError(MultiCoapError):
    __name__ = "ConfigError"
    exit_code = 2


class DataError(MultiCoapError):
    __name__ = "DataError"
    exit_code = 3


class NumericalError(MultiCoapError):
    __name__ = "NumericalError"
    exit_code = 4


# Configuration


class InvalidConfigError(ConfigError):
    __name__ = "InvalidConfigError"
    __desc__ = "Invalid configuration: {}"


class IdentifiabilityBoundError(ConfigError):
    __name__ = "IdentifiabilityBoundError"
    __desc__ = (
        "Condition p−1 > q+q_s violated for study {}: p={}, q={}, q_s={}. "
        "Reduce the number of factors."
    )


class ConfigFileError(ConfigError):
    __name__ = "ConfigFileError"
    __desc__ = "Cannot read configuration file `{}`: {}"


# Data


class DimensionMismatchError(DataError):
    __name__ = "DimensionMismatchError"
    __desc__ = "Dimension mismatch in study {} along axis `{}`: expected {}, got {}."


class NegativeCountError(DataError):
    __name__ = "NegativeCountError"
    __desc__ = "Study {} contains negative counts (minimum {})."


class NonIntegralCountError(DataError):
    __name__ = "NonIntegralCountError"
    __desc__ = "Study {} contains non-integral or non-finite counts."


class NonPositiveNormalizerError(DataError):
    __name__ = "NonPositiveNormalizerError"
    __desc__ = "Study {} has a non-positive normalization factor (minimum {})."


class EmptyDatasetError(DataError):
    __name__ = "EmptyDatasetError"
    __desc__ = "A dataset needs at least one study with at least one observation: {}"


class DataFileError(DataError):
    __name__ = "DataFileError"
    __desc__ = "I/O failure at `{}`: {}"


# Numerical


class NonFiniteElboError(NumericalError):
    __name__ = "NonFiniteElboError"
    __desc__ = "ELBO evaluated to a non-finite value ({}); inputs are not clamped."


class SingularSystemError(NumericalError):
    __name__ = "SingularSystemError"
    __desc__ = (
        "Normal equations of block `{}` are singular even after jitter. "
        "The number of factors likely exceeds the effective rank; try reducing q."
    )


class CollinearCovariatesError(NumericalError):
    __name__ = "CollinearCovariatesError"
    __desc__ = "Covariate Gram matrix is singular (condition number {:.3e}); remove collinear covariates."


class NonSPDGramError(NumericalError):
    __name__ = "NonSPDGramError"
    __desc__ = "Gram matrix is not symmetric positive definite: {}"


class DegenerateSpectrumError(NumericalError):
    __name__ = "DegenerateSpectrumError"
    __desc__ = "All variance proportions are zero; cannot choose a cut ({})."


class RankDeficientEstimateError(NumericalError):
    __name__ = "RankDeficientEstimateError"
    __desc__ = "Estimate is rank deficient (condition number of its Gram matrix {:.3e})."


class SignalTooStrongError(NumericalError):
    __name__ = "SignalTooStrongError"
    __desc__ = "Poisson rate {:.3e} exceeds 1e12 at (study={}, i={}, j={}); lower the signal strengths."


class InternalError(NumericalError):
    __name__ = "InternalError"
    __desc__ = "Internal error: {}"
