#!/usr/bin/env python3
"""
f-divergence generators

Each generator bundles f, its Fenchel conjugate f*, the derivative f' and
its inverse. All four are written with diffcore ops, so they accept arrays
or Tensors and can sit inside a training graph. `output_activation` maps an
unconstrained network output into the conjugate's domain.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..diffcore import Tensor, add, as_tensor, div, exp, log, mul, scale, softplus, sub
from ..errors import DomainError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)

GENERATOR_NAMES = ("KL", "GAN", "scaledKL")

UnaryFn = Callable[[Tensor], Tensor]


@dataclass(frozen=True)
class FGenerator:
    """
    Convex generator of an f-divergence.

    Attributes:
        name: Short identifier ("KL", "GAN", "scaledKL")
        f: u -> f(u), u > 0
        conjugate: t -> f*(t) on `conjugate_domain`
        derivative: u -> f'(u), u > 0
        inverse_derivative: t -> (f')^-1(t) on `conjugate_domain`
        conjugate_domain: Open interval (lo, hi) of valid t
        output_activation: Maps a raw network output into the domain
        kl_family: True when maximizing D_f over the input distribution
            maximizes the mutual information
    """

    name: str
    f: UnaryFn
    conjugate: UnaryFn
    derivative: UnaryFn
    inverse_derivative: UnaryFn
    conjugate_domain: Tuple[float, float] = (-np.inf, np.inf)
    output_activation: Optional[UnaryFn] = None
    kl_family: bool = True

    def check_domain(self, t, what: str = "T") -> None:
        values = as_tensor(t).data
        lo, hi = self.conjugate_domain
        if np.any(values <= lo) or np.any(values >= hi):
            raise DomainError(f"{what} outside the {self.name} generator domain ({lo}, {hi})")


def kl_generator() -> FGenerator:
    """f(u) = u log u, f*(t) = e^(t-1)"""
    return FGenerator(
        name="KL",
        f=lambda u: mul(u, log(u)),
        conjugate=lambda t: exp(sub(t, 1.0)),
        derivative=lambda u: add(log(u), 1.0),
        inverse_derivative=lambda t: exp(sub(t, 1.0)),
    )


def gan_generator() -> FGenerator:
    """f(u) = u log u - (u+1) log(u+1) + log 4, f*(t) = -log(1 - e^t) for t < 0"""

    def f(u):
        u = as_tensor(u)
        u_plus = add(u, 1.0)
        return add(sub(mul(u, log(u)), mul(u_plus, log(u_plus))), np.log(4.0))

    def derivative(u):
        u = as_tensor(u)
        return sub(log(u), log(add(u, 1.0)))

    def inverse_derivative(t):
        e = exp(t)
        return div(e, sub(1.0, e))

    return FGenerator(
        name="GAN",
        f=f,
        conjugate=lambda t: scale(log(sub(1.0, exp(t))), -1.0),
        derivative=derivative,
        inverse_derivative=inverse_derivative,
        conjugate_domain=(-np.inf, 0.0),
        output_activation=lambda v: scale(softplus(scale(v, -1.0)), -1.0),
        kl_family=False,
    )


def scaled_kl_generator(gamma: float) -> FGenerator:
    """f(u) = (u / gamma) log u, f*(t) = e^(gamma t - 1) / gamma"""
    if not gamma > 0:
        raise ValidationError(f"gamma must be positive, got {gamma}", key="gamma")
    return FGenerator(
        name="scaledKL",
        f=lambda u: scale(mul(u, log(u)), 1.0 / gamma),
        conjugate=lambda t: scale(exp(sub(scale(t, gamma), 1.0)), 1.0 / gamma),
        derivative=lambda u: scale(add(log(u), 1.0), 1.0 / gamma),
        inverse_derivative=lambda t: exp(sub(scale(t, gamma), 1.0)),
    )


def f_generator(name: str, gamma: float = 1.0) -> FGenerator:
    """Build a bundled generator by name"""
    if name == "KL":
        return kl_generator()
    if name == "GAN":
        return gan_generator()
    if name == "scaledKL":
        return scaled_kl_generator(gamma)
    raise ValidationError(f"unknown generator '{name}', expected one of {GENERATOR_NAMES}", key="generator")
