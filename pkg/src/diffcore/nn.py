#!/usr/bin/env python3
"""
Dense layers and multilayer perceptrons

Small building blocks shared by the discriminator, encoder and decoder
networks. Weights use the uniform ±sqrt(6 / (fan_in + fan_out)) init and
biases start at zero.
"""

import logging
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..errors import ShapeError, ValidationError
from .tensor import ArrayLike, Parameter, Tensor, as_tensor, bias_add, leaky_relu, matmul

# Set up logging
logger = logging.getLogger(__name__)

Activation = Callable[[Tensor], Tensor]


class Module:
    """Anything that owns Parameters"""

    def parameters(self) -> List[Parameter]:
        raise NotImplementedError

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def num_parameters(self) -> int:
        return int(np.sum([p.size for p in self.parameters()]))


class Dense(Module):
    """Fully connected layer y = x W + b"""

    def __init__(self, fan_in: int, fan_out: int, rng: np.random.Generator, name: str = "dense"):
        if fan_in <= 0 or fan_out <= 0:
            raise ValidationError(f"layer sizes must be positive, got {fan_in}x{fan_out}")
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        self.weight = Parameter(rng.uniform(-limit, limit, size=(fan_in, fan_out)), name=f"{name}.weight")
        self.bias = Parameter(np.zeros(fan_out), name=f"{name}.bias")

    @property
    def fan_in(self) -> int:
        return self.weight.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weight.shape[1]

    def __call__(self, x: ArrayLike) -> Tensor:
        x = as_tensor(x)
        if x.data.ndim != 2 or x.shape[1] != self.fan_in:
            raise ShapeError(f"{self.weight.name}: expected (batch, {self.fan_in}) input, got {x.shape}")
        return bias_add(matmul(x, self.weight), self.bias)

    def parameters(self) -> List[Parameter]:
        return [self.weight, self.bias]


class MLP(Module):
    """
    Stack of dense layers with a shared hidden activation.

    Args:
        sizes: Layer widths including input and output, e.g. [4, 200, 200, 1]
        rng: Generator used for weight init
        output_activation: Applied to the last layer's output (linear when None)
        slope: Negative slope of the leaky ReLU hidden activation
        name: Prefix for parameter names
    """

    def __init__(
        self,
        sizes: Sequence[int],
        rng: np.random.Generator,
        output_activation: Optional[Activation] = None,
        slope: float = 0.2,
        name: str = "mlp",
    ):
        if len(sizes) < 2:
            raise ValidationError(f"an MLP needs at least input and output sizes, got {list(sizes)}")
        self.sizes = [int(s) for s in sizes]
        self.slope = slope
        self.output_activation = output_activation
        self.layers = [
            Dense(fan_in, fan_out, rng, name=f"{name}.{i}")
            for i, (fan_in, fan_out) in enumerate(zip(self.sizes[:-1], self.sizes[1:]))
        ]

    def __call__(self, x: ArrayLike) -> Tensor:
        h = as_tensor(x)
        for layer in self.layers[:-1]:
            h = leaky_relu(layer(h), self.slope)
        out = self.layers[-1](h)
        if self.output_activation is not None:
            out = self.output_activation(out)
        return out

    def parameters(self) -> List[Parameter]:
        return [p for layer in self.layers for p in layer.parameters()]
