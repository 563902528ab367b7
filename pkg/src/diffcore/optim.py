#!/usr/bin/env python3
"""
First-order optimizers

SGD and Adam updates applied in place to Parameters. Adam keeps its moment
buffers and step counter on each Parameter, so a parameter set can be handed
to `optimizer_step` from any loop without a separate optimizer object.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import GraphError, ValidationError
from .tensor import Parameter

# Set up logging
logger = logging.getLogger(__name__)

OPTIMIZER_KINDS = ("Adam", "SGD")


@dataclass(frozen=True)
class OptimizerConfig:
    """Optimizer kind and hyperparameters"""

    kind: str = "Adam"
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.kind not in OPTIMIZER_KINDS:
            raise ValidationError(f"unknown optimizer '{self.kind}', expected one of {OPTIMIZER_KINDS}", key="optimizer")
        if not self.learning_rate > 0:
            raise ValidationError(f"must be positive, got {self.learning_rate}", key="learning_rate")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValidationError(f"Adam betas must lie in [0, 1), got {self.beta1}, {self.beta2}", key="betas")
        if not self.epsilon > 0:
            raise ValidationError(f"must be positive, got {self.epsilon}", key="epsilon")


def optimizer_step(params: Iterable[Parameter], config: OptimizerConfig) -> None:
    """
    Apply one descent step to every parameter using its accumulated grad.

    Gradients are left untouched; callers zero them between steps.

    Args:
        params: Parameters with populated grads
        config: Optimizer kind and hyperparameters

    Raises:
        GraphError: a parameter has no grad buffer
    """
    for param in params:
        if param.grad is None:
            raise GraphError(f"parameter {param.name} has no gradient to apply")
        if config.kind == "SGD":
            param.data -= config.learning_rate * param.grad
            param.step_count += 1
            continue

        param.step_count += 1
        t = param.step_count
        g = param.grad
        param.first_moment *= config.beta1
        param.first_moment += (1.0 - config.beta1) * g
        param.second_moment *= config.beta2
        param.second_moment += (1.0 - config.beta2) * (g * g)

        m_hat = param.first_moment / (1.0 - config.beta1 ** t)
        v_hat = param.second_moment / (1.0 - config.beta2 ** t)
        param.data -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
