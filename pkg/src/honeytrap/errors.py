"""Exception taxonomy shared by every module in the package.

All failures that a caller can provoke through bad input or bad
configuration derive from :class:`HoneytrapError`, so the command-line
client and the HTTP service can map them to a single "invalid input"
outcome without enumerating every subclass.
"""


class HoneytrapError(Exception):
    """Base class for every error this package raises on purpose."""


class ConfigError(HoneytrapError):
    """A configuration value or key is missing, unknown, or out of range."""


class DomainError(HoneytrapError):
    """An input is outside the domain an operation is defined on."""


class FormatError(HoneytrapError):
    """A record file (profile dump, event log, model file) is malformed."""


class ArffError(HoneytrapError):
    """Base class for dataset-file reading and writing problems."""


class ArffParseError(ArffError):
    """The dataset text is not well formed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedArffError(ArffError):
    """Legal dataset syntax that this reader deliberately rejects."""


class AttributeNotFoundError(ArffError):
    """A named attribute does not exist in the dataset."""


class AttributeTypeError(ArffError):
    """An attribute exists but has the wrong type for the operation."""


class TrainingError(HoneytrapError):
    """The training data cannot produce a model (empty, single-class, ...)."""


class SchemaMismatchError(HoneytrapError):
    """A model was applied to, or loaded against, an incompatible schema."""


class EvaluationError(HoneytrapError):
    """An evaluation quantity is undefined for the given input."""


class StratificationError(EvaluationError):
    """The data cannot be split into the requested number of folds."""


class UndefinedMetricError(EvaluationError):
    """A metric's denominator vanishes (e.g. chance agreement of 1)."""


class EmptyCurveError(EvaluationError):
    """A curve was requested over an empty prediction set."""
