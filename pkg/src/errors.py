#!/usr/bin/env python3
"""
Exception hierarchy for the capacity toolkit

All modules raise these so the command layer can map failures to exit codes:
validation problems exit with 1, numerical failures with 2.
"""

from typing import Optional


class CapacityError(Exception):
    """Base class for every error raised by the toolkit"""


class ValidationError(CapacityError, ValueError):
    """A parameter or config value violates a precondition"""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        self.detail = message
        if key:
            message = f"{key}: {message}"
        super().__init__(message)


class ShapeError(CapacityError, ValueError):
    """Operand shapes do not conform"""


class DomainError(ValidationError):
    """A value lies outside the domain of the function applied to it"""


class NonFiniteError(CapacityError, ArithmeticError):
    """An op produced NaN or Inf"""

    def __init__(self, op: str, detail: str = ""):
        self.op = op
        message = f"non-finite output from op '{op}'"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class GraphError(CapacityError, RuntimeError):
    """The differentiation graph is not in a state that allows the request"""


class DivergenceError(CapacityError, RuntimeError):
    """Training produced a non-finite objective and was aborted"""

    def __init__(self, message: str, iteration: int = -1, last_value: float = float("nan")):
        self.iteration = iteration
        self.last_value = last_value
        super().__init__(f"{message} (iteration {iteration}, last finite value {last_value:.6g})")
