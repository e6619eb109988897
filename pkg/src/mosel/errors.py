"""Exception hierarchy shared across the toolkit.

Three branches matter to the CLI exit-code mapping: configuration problems
(bad flags, bad config files), numerical/data failures (singular matrices,
insufficient samples, out-of-domain statistics), and file-format problems.
"""


class MoselError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(MoselError):
    """Invalid configuration: bad flag combination, bad JSON config, bad field value."""


class FormatError(MoselError):
    """Malformed input data file.

    `line` is the 1-based line number of the offending record, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(MoselError):
    """Base class for numerical and data-validity failures."""


class DimensionMismatch(NumericalError):
    """Operands have incompatible shapes."""


class NotHermitian(NumericalError):
    """Matrix expected to be Hermitian (or symmetric) is not, beyond tolerance."""


class NearSingular(NumericalError):
    """Matrix is singular or too close to singular to invert reliably.

    The message reports the smallest eigenvalue encountered.
    """

    def __init__(self, message: str, smallest_eigenvalue: float | None = None):
        if smallest_eigenvalue is not None:
            message = f"{message} (smallest eigenvalue {smallest_eigenvalue:.6e})"
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue


class InvalidSecondOrder(NumericalError):
    """Covariance / pseudo-covariance pair is not jointly realizable.

    Raised when the composite real covariance has a negative eigenvalue
    beyond tolerance, e.g. when a circularity coefficient exceeds 1.
    """


class RankDeficientDesign(NumericalError):
    """Design matrix does not have full column rank."""


class InactiveBranch(NumericalError):
    """SNR/MI decomposition requested where the selection statistic is zero."""


class InvalidR2(NumericalError):
    """Coefficient of determination outside [0, 1)."""


class SmallSample(NumericalError):
    """Sample count too small for the corrected AIC penalty to be defined."""


class EmptyCandidateSet(NumericalError):
    """No model order is available for selection."""


class TooFewSamples(NumericalError):
    """Dataset has too few samples for the requested estimator."""


class SingularCovariance(NumericalError):
    """Sample covariance is singular; typically the sample count must exceed the dimension."""
