class DomainError(ValueError):
    """A precondition on a parameter, grid or coordinate was violated."""


class NoRootError(DomainError):
    """The mu-relation has no root: q lies at or above the fold (explosion regime)."""


class DivergedStateError(ArithmeticError):
    """The state overflowed exp(u) or became non-finite."""


class SingularSystemError(ArithmeticError):
    """A direct linear solve met a zero pivot or a singular factor."""


class StudyError(RuntimeError):
    def __init__(self, message: str, level: int | None = None, report=None) -> None:
        super().__init__(message)
        self.level = level
        self.report = report
