#!/usr/bin/env python3
"""
Value functions and mutual-information extraction

Every value function takes discriminator outputs on paired (joint) and
unpaired (product-of-marginals) samples and returns a scalar Tensor that is
differentiable with respect to those outputs. Expectations are batch means
by default; passing per-sample weights turns them into exact expectations,
which is how the discrete enumeration oracles reuse this code path.

All quantities are in nats.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..diffcore import Tensor, as_tensor, clip, exp, log, mean, mul, power, reduce_sum, scale, sub
from ..errors import DomainError, ValidationError
from .generators import FGenerator

# Set up logging
logger = logging.getLogger(__name__)

# exp() arguments above this are clamped before exponentiation
EXP_LIMIT = 80.0


@dataclass
class ClipCounter:
    """Counts exp arguments clamped at EXP_LIMIT"""

    events: int = 0

    def add(self, count: int) -> None:
        self.events += int(count)


def guarded_exp(t, counter: Optional[ClipCounter] = None) -> Tensor:
    t = as_tensor(t)
    clipped = int(np.count_nonzero(t.data > EXP_LIMIT))
    if clipped:
        logger.debug(f"{clipped} exp arguments clamped at {EXP_LIMIT}")
        if counter is not None:
            counter.add(clipped)
    return exp(clip(t, hi=EXP_LIMIT))


def expectation(t, weights: Optional[np.ndarray] = None) -> Tensor:
    """Batch mean, or the weighted sum when weights are given"""
    t = as_tensor(t)
    if t.size == 0:
        raise ValidationError("expectation over an empty batch")
    if weights is None:
        return mean(t)
    w = np.asarray(weights, dtype=np.float64).reshape(t.shape)
    return reduce_sum(mul(t, w))


def _check_positive(d: Tensor, what: str) -> None:
    if np.any(d.data <= 0):
        raise DomainError(f"{what} must be strictly positive")


def value_mine(t_paired, t_unpaired, weights_paired=None, weights_unpaired=None,
               counter: Optional[ClipCounter] = None) -> Tensor:
    """Donsker-Varadhan bound: E_P[T] - log E_Q[e^T]"""
    return sub(expectation(t_paired, weights_paired),
               log(expectation(guarded_exp(t_unpaired, counter), weights_unpaired)))


def value_nwj(t_paired, t_unpaired, weights_paired=None, weights_unpaired=None,
              counter: Optional[ClipCounter] = None) -> Tensor:
    """E_P[T] - E_Q[e^(T - 1)]"""
    return sub(expectation(t_paired, weights_paired),
               expectation(guarded_exp(sub(t_unpaired, 1.0), counter), weights_unpaired))


def value_smile(t_paired, t_unpaired, tau: float, weights_paired=None, weights_unpaired=None,
                counter: Optional[ClipCounter] = None) -> Tensor:
    """
    MINE with the unpaired density ratio e^T clipped to [e^-tau, e^tau].

    tau = inf recovers value_mine; tau = 0 leaves E_P[T].
    """
    if not tau >= 0:
        raise ValidationError(f"tau must be non-negative, got {tau}", key="tau")
    clipped = clip(t_unpaired, -tau, tau)
    return sub(expectation(t_paired, weights_paired),
               log(expectation(guarded_exp(clipped, counter), weights_unpaired)))


def value_ddime(d_paired, d_unpaired, alpha: float, weights_paired=None, weights_unpaired=None) -> Tensor:
    """alpha E_P[log D] - E_Q[D]"""
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}", key="alpha")
    d_paired, d_unpaired = as_tensor(d_paired), as_tensor(d_unpaired)
    _check_positive(d_paired, "D on paired samples")
    _check_positive(d_unpaired, "D on unpaired samples")
    return sub(scale(expectation(log(d_paired), weights_paired), alpha),
               expectation(d_unpaired, weights_unpaired))


def estimate_ddime(value, alpha: float) -> float:
    """J / alpha + 1 - log(alpha)"""
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}", key="alpha")
    return float(as_tensor(value).item()) / alpha + 1.0 - np.log(alpha)


def value_fdime(t_paired, t_unpaired, generator: FGenerator, weights_paired=None, weights_unpaired=None) -> Tensor:
    """E_P[T] - E_Q[f*(T)]"""
    generator.check_domain(t_unpaired, "T on unpaired samples")
    return sub(expectation(t_paired, weights_paired),
               expectation(generator.conjugate(t_unpaired), weights_unpaired))


def estimate_fdime(t_paired, generator: FGenerator, weights_paired=None) -> float:
    """E_P[log (f')^-1(T)], the density ratio recovered from the optimal T"""
    generator.check_domain(t_paired, "T on paired samples")
    ratio = generator.inverse_derivative(as_tensor(t_paired).detach())
    return expectation(log(ratio), weights_paired).item()


def value_gamma(d_paired, d_unpaired, gamma: float, weights_paired=None, weights_unpaired=None) -> Tensor:
    """gamma E_P[log D] - E_Q[D^gamma]"""
    if not gamma > 0:
        raise ValidationError(f"gamma must be positive, got {gamma}", key="gamma")
    d_paired, d_unpaired = as_tensor(d_paired), as_tensor(d_unpaired)
    _check_positive(d_paired, "D on paired samples")
    _check_positive(d_unpaired, "D on unpaired samples")
    return sub(scale(expectation(log(d_paired), weights_paired), gamma),
               expectation(power(d_unpaired, gamma), weights_unpaired))


def estimate_gamma(value) -> float:
    """Lower-bound form J + 1"""
    return float(as_tensor(value).item()) + 1.0


def direct_gamma_estimate(d_paired, gamma: float, weights_paired=None) -> float:
    """E_P[gamma log D], since the optimal D is the ratio to the power 1/gamma"""
    d_paired = as_tensor(d_paired).detach()
    _check_positive(d_paired, "D on paired samples")
    return gamma * expectation(log(d_paired), weights_paired).item()
