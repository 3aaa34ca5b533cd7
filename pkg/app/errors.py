from __future__ import annotations

from typing import Optional


class PadetrackError(Exception):
    """Base class for every error raised by the solver."""


class InvalidArgumentError(PadetrackError, ValueError):
    pass


class SingularMatrixError(PadetrackError):
    pass


class DomainError(PadetrackError):
    """A toric system was evaluated where some coordinate is zero."""


class SingularJacobianError(PadetrackError):
    pass


class InvalidStartError(PadetrackError):
    """The point handed to the series solver is not on the homotopy."""


class PoleEvaluationError(PadetrackError):
    pass


class StepUnderflowError(PadetrackError):
    def __init__(self, dt: float, min_step: float):
        super().__init__(f"step {dt:.3e} below minimum {min_step:.3e}")
        self.dt = dt
        self.min_step = min_step


class ParseError(PadetrackError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column
