#!/usr/bin/env python3
"""
Analytic channel models

Codeword batches are (B, 2n) real tensors: the first n columns hold the real
parts of the n complex symbols and the last n the imaginary parts. Power
normalization and transmission are built from diffcore ops so the encoder
receives gradients through them.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..diffcore import Tensor, add, as_tensor, concat, mean, mul, power, reduce_sum, take
from ..errors import ShapeError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)

CHANNEL_KINDS = ("AWGN", "Rayleigh")


@dataclass(frozen=True)
class ChannelModel:
    """
    Memoryless channel.

    Attributes:
        kind: "AWGN" or "Rayleigh" (i.i.d. fading per complex symbol)
        noise_variance: sigma^2 per complex symbol, split evenly over the
            real and imaginary dimensions
    """

    kind: str
    noise_variance: float

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValidationError(f"unknown channel '{self.kind}', expected one of {CHANNEL_KINDS}", key="kind")
        if not self.noise_variance > 0:
            raise ValidationError(f"noise variance must be positive, got {self.noise_variance}", key="noise_variance")

    @classmethod
    def from_ebn0(cls, kind: str, ebn0_db: float, rate: float) -> "ChannelModel":
        return cls(kind, ebn0_to_noise_variance(ebn0_db, rate))

    @property
    def snr_linear(self) -> float:
        return snr_from_noise_variance(self.noise_variance)


def _symbol_count(x: Tensor) -> int:
    if x.data.ndim != 2 or x.shape[1] % 2 != 0:
        raise ShapeError(f"codeword batches are (B, 2n), got {x.shape}")
    return x.shape[1] // 2


def symbol_power(x) -> np.ndarray:
    """Per-codeword average power per complex symbol"""
    x = as_tensor(x)
    n = _symbol_count(x)
    return np.sum(x.data ** 2, axis=1) / n


def normalize_power(x, per_codeword: bool = False) -> Tensor:
    """
    Scale codewords to unit average power per complex symbol.

    With per_codeword False one scalar is applied to the whole batch so the
    batch-average power is 1; otherwise every codeword is scaled on its own.

    Args:
        x: (B, 2n) encoder output
        per_codeword: Apply the constraint to each codeword

    Returns:
        Normalized batch, differentiable with respect to x

    Raises:
        ValidationError: the batch (or a codeword) has zero power
    """
    x = as_tensor(x)
    n = _symbol_count(x)
    if x.shape[0] == 0:
        raise ValidationError("cannot normalize an empty batch")
    powers = symbol_power(x)
    if per_codeword:
        if np.any(powers <= 0):
            raise ValidationError("cannot normalize a codeword with zero power")
        energy = reduce_sum(power(x, 2.0), axis=1, keepdims=True)
        return mul(x, power(mul(energy, 1.0 / n), -0.5))
    if not np.mean(powers) > 0:
        raise ValidationError("cannot normalize a batch with zero power")
    avg = mul(mean(reduce_sum(power(x, 2.0), axis=1)), 1.0 / n)
    return mul(x, power(avg, -0.5))


def transmit(x, model: ChannelModel, rng: np.random.Generator) -> Tensor:
    """
    Pass a normalized batch through the channel.

    AWGN: y = x + w. Rayleigh: y = h * x + w per complex symbol, with h
    circularly-symmetric complex Gaussian, E|h|^2 = 1, drawn independently
    per symbol. Noise is N(0, sigma^2 / 2) per real dimension and is drawn
    fresh on every call.
    """
    x = as_tensor(x)
    n = _symbol_count(x)
    noise = rng.normal(0.0, np.sqrt(model.noise_variance / 2.0), size=x.shape)
    if model.kind == "AWGN":
        return add(x, noise)

    batch = x.shape[0]
    h_re = rng.normal(0.0, np.sqrt(0.5), size=(batch, n))
    h_im = rng.normal(0.0, np.sqrt(0.5), size=(batch, n))
    x_re = take(x, np.arange(n), axis=1)
    x_im = take(x, np.arange(n, 2 * n), axis=1)
    y_re = add(mul(x_re, h_re), mul(x_im, -h_im))
    y_im = add(mul(x_im, h_re), mul(x_re, h_im))
    return add(concat([y_re, y_im], axis=1), noise)


def ebn0_to_noise_variance(ebn0_db: float, rate: float) -> float:
    """
    Noise variance per complex symbol for a given Eb/N0 and rate.

    With unit symbol energy Es = 1 and Eb = 1 / rate, sigma^2 = N0 =
    1 / (rate * 10^(ebn0_db / 10)).
    """
    if not rate > 0:
        raise ValidationError(f"rate must be positive, got {rate}", key="rate")
    return 1.0 / (rate * 10.0 ** (ebn0_db / 10.0))


def snr_from_noise_variance(noise_variance: float) -> float:
    if not noise_variance > 0:
        raise ValidationError(f"noise variance must be positive, got {noise_variance}")
    return 1.0 / noise_variance
