"""Exception and warning classes shared by every module.

Each exception carries a ``code`` string used by the command-line front end
to emit machine-readable error objects.
"""


class FreqGCError(Exception):
    """Base class for all errors raised by freqgc."""

    code = "FREQGC_ERROR"


# var_core
class InsufficientData(FreqGCError):
    code = "VAR_INSUFFICIENT_DATA"


class SingularRegressors(FreqGCError):
    code = "VAR_SINGULAR_REGRESSORS"


class NotVar1(FreqGCError):
    code = "VAR_NOT_VAR1"


class NonStationary(FreqGCError):
    code = "VAR_NON_STATIONARY"


# spectra
class SingularAtFrequency(FreqGCError):
    code = "SPECTRA_SINGULAR_AT_FREQUENCY"

    def __init__(self, omega, message=None):
        self.omega = omega
        super().__init__(message or f"transfer matrix is singular at omega={omega:.6g}")


class DegenerateCovariance(FreqGCError):
    code = "SPECTRA_DEGENERATE_COVARIANCE"


class MisalignedModels(FreqGCError):
    code = "SPECTRA_MISALIGNED_MODELS"


class NumericalInconsistency(FreqGCError):
    code = "SPECTRA_NUMERICAL_INCONSISTENCY"


# bootstrap
class EmptySample(FreqGCError):
    code = "BOOT_EMPTY_SAMPLE"


class ReplicateFailure(FreqGCError):
    code = "BOOT_REPLICATE_FAILURE"


class QuantileUnstable(UserWarning):
    """The Bonferroni tail quantile rests on too few bootstrap draws."""


# bc_test
class InsufficientLags(FreqGCError):
    code = "BC_INSUFFICIENT_LAGS"


class SingularRestriction(FreqGCError):
    code = "BC_SINGULAR_RESTRICTION"


class DomainError(FreqGCError):
    code = "BC_DOMAIN_ERROR"


# filters
class TooShort(FreqGCError):
    code = "FILTERS_TOO_SHORT"


# sim_harness
class ExplodingPath(FreqGCError):
    code = "SIM_EXPLODING_PATH"


class TooManyFailures(FreqGCError):
    code = "SIM_TOO_MANY_FAILURES"


# cli / ingestion
class ParseError(FreqGCError):
    code = "CLI_PARSE_ERROR"


class MissingColumn(FreqGCError):
    code = "CLI_MISSING_COLUMN"


class NonNumeric(FreqGCError):
    code = "CLI_NON_NUMERIC"

    def __init__(self, row, column, value=""):
        self.row = row
        self.column = column
        super().__init__(f"non-numeric cell {value!r} at row {row}, column {column!r}")
