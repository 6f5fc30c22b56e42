"""Exception types shared across the package."""


class FolnerLabError(Exception):
    """Base class for all package errors."""


class ContextMismatchError(FolnerLabError, ValueError):
    """Elements or multisets from different group contexts were combined."""


class SpecParseError(FolnerLabError, ValueError):
    """A group, word or multiset literal could not be parsed."""


class BudgetError(FolnerLabError, RuntimeError):
    """A configured size/depth/step budget would be exceeded.

    Raised instead of silently truncating; callers may raise the budget.
    """

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class MethodNotApplicableError(FolnerLabError, ValueError):
    """The requested estimation route does not apply to the given input."""


class ActionError(FolnerLabError, ValueError):
    """A user-supplied group action is missing a generator or not invertible."""


class UncertifiedInputError(FolnerLabError, ValueError):
    """A heuristic value was fed where a certified bound is required."""


class InvariantViolation(FolnerLabError, AssertionError):
    """An internal mathematical invariant failed; indicates a bug."""


class CoercionError(FolnerLabError, TypeError):
    """Two function representations cannot be brought to a common one."""
