"""Exception hierarchy.

Every error raised on purpose by this package derives from ``CoupledTPSError``.
The CLI maps the three families below to stable exit codes:

* ``UsageError`` subclasses (bad input, I/O, schema)  -> 2
* ``DegenerateConfiguration`` and subclasses          -> 3
* ``PredictorFailure``                                -> 4
"""


class CoupledTPSError(Exception):
    pass


class UsageError(CoupledTPSError, ValueError):
    pass


class InvalidDimensions(UsageError):
    pass


class DimensionMismatch(UsageError):
    pass


class CountMismatch(UsageError):
    pass


class TooSmall(UsageError):
    pass


class DegenerateConfiguration(CoupledTPSError, ArithmeticError):
    """The TPS system is singular (collinear, duplicated or too few sources)."""


class DuplicatePoints(DegenerateConfiguration):
    pass


class PredictorFailure(CoupledTPSError):
    pass


class FormatError(UsageError):
    pass


class ParseError(FormatError):
    def __init__(self, message, offset=None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class SchemaError(FormatError):
    def __init__(self, field, message=None):
        super().__init__(message or f"missing or invalid field: {field!r}")
        self.field = field


class BadMagic(FormatError):
    pass


class TruncatedFile(FormatError):
    pass


class UnsupportedFormat(FormatError):
    pass


class DecodeError(FormatError):
    pass
