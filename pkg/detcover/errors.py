"""Exception hierarchy shared by every detcover module."""
from typing import Optional, Tuple


class DetCoverError(Exception):
    """Base class for all errors raised by detcover."""


class FormSyntaxError(DetCoverError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NonHomogeneousError(DetCoverError, ValueError):
    def __init__(self, degrees: Tuple[int, int]):
        super().__init__(f"form is not homogeneous: found terms of degree {degrees[0]} and {degrees[1]}")
        self.degrees = degrees


class VariableIndexError(DetCoverError, ValueError):
    def __init__(self, name: str, num_vars: int, position: Optional[int] = None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"variable {name} out of range for {num_vars} variables{where}")
        self.position = position


class LengthMismatchError(DetCoverError, ValueError):
    pass


class ZeroVectorError(DetCoverError, ValueError):
    pass


class DenominatorError(DetCoverError, ValueError):
    pass


class ShapeError(DetCoverError, ValueError):
    pass


class InvalidVarietyError(DetCoverError, ValueError):
    pass


class PointNotOnVarietyError(DetCoverError, ValueError):
    pass


class UnsupportedVarietyError(DetCoverError):
    pass


class UndecidableError(UnsupportedVarietyError):
    """Ideal membership cannot be decided at desk scale for this variety kind."""


class BudgetExceededError(DetCoverError):
    pass


class ClassMismatchError(DetCoverError, ValueError):
    pass


class SingularClassError(DetCoverError, ValueError):
    pass


class PlannerError(DetCoverError, ValueError):
    pass


class ConfigError(DetCoverError, ValueError):
    pass
