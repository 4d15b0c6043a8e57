"""Exception hierarchy shared by all modules."""


class ToricError(Exception):
    """Base class for every error raised by toricadj."""


class InputError(ToricError, ValueError):
    """Malformed or out-of-range input (CLI exit code 2)."""


class DegenerateInput(InputError):
    pass


class InputTooLarge(InputError):
    pass


class ParseError(InputError):
    pass


class FlagError(InputError):
    pass


class InvalidParameter(InputError):
    pass


class BoxTooLarge(InputError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class PreconditionViolated(ToricError):
    """A mathematical precondition does not hold (CLI exit code 3)."""


class NotSmooth(PreconditionViolated):
    def __init__(self, message, cone=None):
        super().__init__(message)
        self.cone = cone


class NotNef(PreconditionViolated):
    pass


class NotAmple(PreconditionViolated):
    pass


class FanMismatch(PreconditionViolated):
    pass


class ExcludedSurface(PreconditionViolated):
    """Raised for statements that exclude the projective plane."""


class InvariantViolation(ToricError):
    """An identity that must hold by theory failed; indicates a bug."""
