"""Exception hierarchy shared by every module.

Each exception carries an ``exit_code`` so the command-line front end can map
failures onto its documented exit statuses without a lookup table.
"""


class MswaError(Exception):
    exit_code = 1


class UsageError(MswaError):
    exit_code = 1


class ValidationError(MswaError):
    """Input is well-formed but violates a semantic requirement."""

    exit_code = 2


class ShapeError(ValidationError):
    pass


class VocabularyError(ValidationError):
    pass


class AlphabetMismatchError(ValidationError):
    pass


class RegexSyntaxError(ValidationError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class MalformedWeightError(ValidationError):
    pass


class McViolationError(ValidationError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class ResourceError(MswaError):
    exit_code = 3


class NumericError(MswaError):
    exit_code = 4


class DegenerateModelError(NumericError):
    pass


class NotADistributionError(NumericError):
    pass


class DivergenceError(NumericError):
    pass


class UnsupportedError(ValidationError):
    """The requested operation is not defined for this semiring."""


class InternalInvariantError(MswaError):
    exit_code = 4
