"""Exception hierarchy shared by every ptk module.

All domain failures derive from :class:`PtkError`; the CLI maps them to
exit code 1.
"""


class PtkError(Exception):
    pass


class IndexBeyondHorizon(PtkError, IndexError):
    pass


class OutOfRange(PtkError, ValueError):
    pass


class EmptyBase(PtkError, ValueError):
    pass


class HorizonRequired(PtkError):
    pass


class OrderUnknown(PtkError):
    pass


class DuplicateMember(PtkError, ValueError):
    pass


class NotVeryLargeAtHorizon(PtkError):
    pass


class EmptyMember(PtkError, ValueError):
    pass


class NotInSkippedRestriction(PtkError, ValueError):
    pass


class NotMember(PtkError, ValueError):
    pass


class NotAPlegmaUnion(PtkError, ValueError):
    pass


class WrongArity(PtkError, ValueError):
    pass


class BadIndex(PtkError, ValueError):
    pass


class ToleranceUnreachable(PtkError):
    """Raised only when the caller asks for strict tolerance; carries the interval."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SupportTooLarge(PtkError, ValueError):
    pass


class BadParameters(PtkError, ValueError):
    pass


class NoTupleAtStep(PtkError):
    pass


class EmptyRestriction(PtkError):
    pass


class BudgetExhausted(PtkError):
    pass
