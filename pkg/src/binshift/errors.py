"""Exception hierarchy.

``InputError`` subclasses are problems with what the caller supplied.
``InternalInconsistency`` means a computed object contradicts one of the
structural theorems the library relies on, i.e. a bug in this package.
"""


class BinshiftError(Exception):
    pass


class InputError(BinshiftError):
    pass


class ParseError(InputError):
    def __init__(self, message, text="", position=0, expected=""):
        self.text = text
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class InvalidStream(InputError):
    pass


class MirrorPeriodic(InputError):
    def __init__(self, message, period=None):
        self.period = period
        super().__init__(message)


class IndexBeyondPrefix(InputError):
    pass


class NotABreakPoint(InputError):
    pass


class NotEnoughBreakPoints(InputError):
    pass


class PlateauUnbounded(InputError):
    """No descent in the nullity sequence within the scan horizon."""


class SizeTooLarge(InputError):
    pass


class StructureViolation(BinshiftError):
    def __init__(self, message, index):
        self.index = index
        super().__init__(f"{message} at index {index}")


class InternalInconsistency(BinshiftError):
    def __init__(self, message, dump=None):
        self.dump = dump or {}
        super().__init__(message)
