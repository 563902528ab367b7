#!/usr/bin/env python3
"""
Mutual information versus SNR

For every Eb/N0 point and estimator a discriminator is trained on (x, y)
pairs drawn from the frozen encoder and the channel at that point. Codeword
estimates are divided by n so rows read in bits per channel use, next to the
link rate and the channel capacity.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..autoencoder import CodedLink
from ..channel import ChannelModel, awgn_capacity_bits, rayleigh_ergodic_capacity_bits, transmit
from ..diffcore import no_grad
from ..errors import DivergenceError, ValidationError
from ..estimators import EstimatorSpec, EstimatorTrainer, train_estimator

# Set up logging
logger = logging.getLogger(__name__)

LN2 = float(np.log(2.0))


@dataclass
class MiSweepPoint:
    estimator: str
    ebn0_db: float
    mi_nats: float
    mi_bits: float
    capacity_bits: float
    rate_bits: float
    seed: int


class LinkSampler:
    """Joint (x, y) batches from a frozen encoder and a channel"""

    def __init__(self, system: CodedLink):
        self.system = system

    def sample(self, batch_size: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        with no_grad():
            messages = rng.integers(0, self.system.M, size=batch_size)
            x = self.system.encode(messages)
            y = transmit(x, self.system.channel, rng)
        return x.data, y.data


def capacity_reference_bits(channel: ChannelModel) -> float:
    """Capacity per complex channel use at SNR 1/sigma^2"""
    if channel.kind == "Rayleigh":
        return float(rayleigh_ergodic_capacity_bits(channel.snr_linear))
    return float(awgn_capacity_bits(channel.snr_linear))


def sweep_mi(
    system: CodedLink,
    specs: Sequence[EstimatorSpec],
    ebn0_grid: Sequence[float],
    seed: int = 0,
    warm_start: bool = False,
    disable_progress: bool = False,
) -> List[MiSweepPoint]:
    """
    Estimate I(X;Y) of a trained link across an Eb/N0 grid.

    Args:
        system: Link whose encoder is held fixed
        specs: Estimators to run at every point
        ebn0_grid: Eb/N0 points in dB
        seed: Base seed; point i, estimator j draws from (seed + i, j)
        warm_start: Continue each estimator's discriminator from the previous point
        disable_progress: Hide progress bars

    Returns:
        Points in grid order, estimators in the given order within a point.
        A diverged estimator yields NaN for that point only.
    """
    grid = [float(v) for v in ebn0_grid]
    if not grid:
        raise ValidationError("the Eb/N0 grid is empty", key="eval.ebn0_grid")
    if not specs:
        raise ValidationError("no estimators given", key="eval.estimators")

    dim = 2 * system.n
    carried: Dict[int, EstimatorTrainer] = {}
    points = []
    for index, ebn0_db in enumerate(grid):
        channel = ChannelModel.from_ebn0(system.channel.kind, ebn0_db, system.rate)
        sampler = LinkSampler(system.with_channel(channel))
        capacity = capacity_reference_bits(channel)
        for j, spec in enumerate(specs):
            rng = np.random.default_rng((seed + index, j))
            start = carried.get(j) if warm_start else None
            if start is None:
                start = EstimatorTrainer(spec, dim, dim, rng)
            try:
                trainer, trace = train_estimator(spec, sampler, rng, trainer=start, disable_progress=disable_progress)
                mi_nats = trace.smoothed_mi_nats / system.n
                carried[j] = trainer
            except DivergenceError as e:
                logger.error(f"{spec.label} at {ebn0_db} dB: {e}")
                mi_nats = float("nan")
                carried.pop(j, None)
            point = MiSweepPoint(spec.label, ebn0_db, mi_nats, mi_nats / LN2, capacity, system.rate, seed + index)
            logger.info(
                f"{spec.label} at {ebn0_db:5.1f} dB: {point.mi_bits:.4f} bits/use "
                f"(capacity {capacity:.4f}, R={system.rate:.4f})"
            )
            points.append(point)
    return points
