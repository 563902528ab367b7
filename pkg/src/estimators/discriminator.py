#!/usr/bin/env python3
"""
Discriminator network

Two hidden layers of leaky ReLU units on the raw concatenation [x, y]. The
head is linear for MINE, NWJ and SMILE (producing T), softplus for d-DIME and
gamma-DIME (producing D > 0), and the generator's output activation for
f-DIME.
"""

import logging
from typing import List, Optional

import numpy as np

from ..diffcore import MLP, Module, Parameter, Tensor, as_tensor, concat, softplus
from ..errors import ShapeError
from .generators import FGenerator
from .spec import EstimatorSpec

# Set up logging
logger = logging.getLogger(__name__)

HIDDEN_LAYERS = 2


class DiscriminatorNet(Module):
    """
    (dx + dy) -> hidden -> hidden -> 1 network scoring (x, y) pairs.

    Args:
        x_dim: Dimension of x
        y_dim: Dimension of y
        spec: Estimator the network serves; picks the head
        rng: Generator used for weight init
    """

    def __init__(self, x_dim: int, y_dim: int, spec: EstimatorSpec, rng: np.random.Generator):
        self.x_dim = x_dim
        self.y_dim = y_dim
        self.head = self._head_name(spec)
        generator: Optional[FGenerator] = spec.f_generator()
        if self.head == "softplus":
            activation = softplus
        elif generator is not None:
            activation = generator.output_activation
        else:
            activation = None
        sizes = [x_dim + y_dim] + [spec.hidden_units] * HIDDEN_LAYERS + [1]
        self.mlp = MLP(sizes, rng, output_activation=activation, slope=0.2, name="disc")
        logger.debug(f"Discriminator {sizes} with {self.head} head")

    @staticmethod
    def _head_name(spec: EstimatorSpec) -> str:
        if spec.kind in ("dDIME", "gammaDIME"):
            return "softplus"
        if spec.kind == "fDIME" and spec.f_generator().output_activation is not None:
            return spec.generator
        return "linear"

    def __call__(self, x, y) -> Tensor:
        x, y = as_tensor(x), as_tensor(y)
        if x.shape[0] != y.shape[0] or x.shape[1] != self.x_dim or y.shape[1] != self.y_dim:
            raise ShapeError(f"discriminator expects ({self.x_dim}, {self.y_dim}) features, got {x.shape} and {y.shape}")
        return self.mlp(concat([x, y], axis=1))

    def parameters(self) -> List[Parameter]:
        return self.mlp.parameters()
