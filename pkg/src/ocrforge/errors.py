"""Exception hierarchy.

Every error raised on bad input derives from :class:`DataError`, which the
CLI maps to exit code 2. :class:`UsageError` maps to exit code 1.
"""


class OcrForgeError(Exception):
    """Base class for all package errors."""


class UsageError(OcrForgeError):
    pass


class DataError(OcrForgeError):
    pass


# geometry
class DegenerateQuad(DataError):
    pass


class PointAtInfinity(DataError):
    pass


# corpus
class EmptyTemplateSet(DataError):
    pass


class MissingLexiconForLanguage(DataError):
    pass


class InsufficientInputs(DataError):
    pass


class TemplateError(DataError):
    pass


# render
class UnsupportedKind(DataError):
    pass


class LayoutOverflow(DataError):
    pass


class UnrenderableAtMinimumScale(DataError):
    pass


# degrade
class ParamOutOfRange(DataError):
    pass


class DegenerateWarp(DataError):
    pass


class ChainError(DataError):
    """A degradation chain aborted; ``index`` is the failing position."""

    def __init__(self, index, kind, cause):
        self.index = index
        self.kind = kind
        self.cause = cause
        super().__init__(f"degradation #{index} ({kind}) failed: {cause}")


# viztrans
class MaskDimensionMismatch(DataError):
    pass


class NoRegionsFound(DataError):
    pass


class FullyMaskedImage(DataError):
    pass


class InvalidJob(DataError):
    pass


# metrics
class EmptyCorpus(DataError):
    pass


class EmptyQuery(UsageError):
    pass


class UnknownId(DataError):
    pass


class MissingTargetText(DataError):
    pass


class DuplicatePredictionId(DataError):
    pass


# manifest
class DuplicateId(DataError):
    pass


class MalformedLine(DataError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: malformed record" + (f" ({reason})" if reason else ""))


class InvariantViolation(DataError):
    def __init__(self, line_no, field, reason=""):
        self.line_no = line_no
        self.field = field
        super().__init__(f"line {line_no}: invariant violated for {field!r}" + (f": {reason}" if reason else ""))


class IoFailure(DataError):
    pass
