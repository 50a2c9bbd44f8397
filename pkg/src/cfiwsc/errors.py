"""Exception types shared across the package."""

from __future__ import annotations


class CfiwscError(Exception):
    """Base class for all library errors."""


class SizeLimitExceeded(CfiwscError):
    """An exact search was asked to run on a structure above its bound."""


class BudgetExceeded(CfiwscError):
    """A tuple-space or node budget would be exceeded."""


class DuplicateVertexError(CfiwscError, ValueError):
    pass


class NotAPathError(CfiwscError, ValueError):
    pass


class NotCfiShapedError(CfiwscError, ValueError):
    pass


class CycleRemainsError(CfiwscError):
    """Raised by the pair-order fixpoint when the seed leaves a base cycle."""

    def __init__(self, cycle: list[int]):
        super().__init__(f"base cycle not broken by seed: {cycle}")
        self.cycle = cycle


class DisconnectedBaseError(CfiwscError, ValueError):
    pass


class ArityBoundExceeded(CfiwscError, ValueError):
    pass


class ClassCountMismatch(CfiwscError, ValueError):
    pass


class DisconnectedPartError(CfiwscError, ValueError):
    pass


class BoundExceeded(CfiwscError, ValueError):
    pass


class KTooSmall(CfiwscError, ValueError):
    pass


class SizeMismatch(CfiwscError, ValueError):
    pass


class WrongVariant(CfiwscError, ValueError):
    pass


class NonGraphInput(CfiwscError, ValueError):
    pass


class NonMonotoneStepError(CfiwscError):
    pass


class ArityMismatchError(CfiwscError, ValueError):
    pass


class UnwitnessedChoiceError(CfiwscError):
    pass


class NotProgressingError(CfiwscError):
    pass


class ReadyConditionError(CfiwscError):
    """A ready oracle returned a singleton while a non-trivial orbit exists."""
