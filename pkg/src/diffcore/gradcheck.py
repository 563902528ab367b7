#!/usr/bin/env python3
"""
Finite-difference gradient checking

Compares the analytic gradients produced by `backward` against central
differences, entry by entry, for every parameter of a graph.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import GraphError, ValidationError
from .tensor import Tensor, backward, no_grad, zero_grads

# Set up logging
logger = logging.getLogger(__name__)

# Denominator floor for the relative error; below it the error reads as absolute
RELATIVE_FLOOR = 1e-3


@dataclass
class GradCheckReport:
    """Worst disagreement between analytic and numeric gradients"""

    max_rel_error: float
    worst_parameter: str
    worst_index: tuple
    analytic: float
    numeric: float
    tolerance: float
    entries_checked: int

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), RELATIVE_FLOOR)


def gradient_check(
    build: Callable[[], Tensor],
    params: Sequence[Tensor],
    step: float = 1e-5,
    tolerance: float = 1e-4,
) -> GradCheckReport:
    """
    Check `backward` against central differences.

    Args:
        build: Re-runs the forward pass and returns the scalar output
        params: Leaves to check (perturbed in place, then restored)
        step: Finite-difference half width
        tolerance: Pass threshold on the max relative error

    Returns:
        Report on the worst entry over all parameters

    Raises:
        GraphError: no parameters were given
        ValidationError: step is not positive
    """
    if not params:
        raise GraphError("gradient check needs at least one parameter")
    if not step > 0:
        raise ValidationError(f"finite-difference step must be positive, got {step}")

    zero_grads(params)
    backward(build())
    analytic = [p.grad.copy() for p in params]

    worst = GradCheckReport(0.0, params[0].name or "param0", (), 0.0, 0.0, tolerance, 0)
    checked = 0
    with no_grad():
        for k, (param, grad) in enumerate(zip(params, analytic)):
            label = param.name or f"param{k}"
            for index in np.ndindex(param.shape):
                original = param.data[index]
                param.data[index] = original + step
                upper = build().item()
                param.data[index] = original - step
                lower = build().item()
                param.data[index] = original
                numeric = (upper - lower) / (2.0 * step)
                error = relative_error(float(grad[index]), numeric)
                checked += 1
                if error > worst.max_rel_error or checked == 1:
                    worst = GradCheckReport(error, label, index, float(grad[index]), numeric, tolerance, 0)

    zero_grads(params)
    worst.entries_checked = checked
    logger.debug(f"gradient check: max relative error {worst.max_rel_error:.3e} at {worst.worst_parameter}{worst.worst_index}")
    return worst
