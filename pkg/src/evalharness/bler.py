#!/usr/bin/env python3
"""
Block error rate Monte-Carlo

Sends uniform random messages through a link at each Eb/N0 point until a
target number of block errors or a block budget is reached. Each grid point
draws from its own generator seeded with seed + point index. Codewords come
from a codebook encoded once over all M messages, so batch-average power
normalization gives the same constellation for every chunk size.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from scipy.special import expit
from tqdm import tqdm

from ..autoencoder import CodedLink, decode_hard_batch
from ..channel import ChannelModel, transmit
from ..diffcore import Tensor, as_tensor, concat, no_grad
from ..errors import ShapeError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)

CHUNK_BLOCKS = 20000


def codebook(link: CodedLink) -> np.ndarray:
    """Encoded constellation of every message, row m for message m"""
    with no_grad():
        return link.encode(np.arange(link.M)).data.copy()


@dataclass
class BlerPoint:
    ebn0_db: float
    blocks: int
    errors: int
    seed: int

    def __post_init__(self):
        if self.blocks <= 0:
            raise ValidationError(f"a BLER point needs at least one block, got {self.blocks}")
        if not 0 <= self.errors <= self.blocks:
            raise ValidationError(f"{self.errors} errors out of {self.blocks} blocks")

    @property
    def bler(self) -> float:
        return self.errors / self.blocks

    @property
    def standard_error(self) -> float:
        """Binomial standard error of the BLER estimate"""
        p = self.bler
        return float(np.sqrt(p * (1.0 - p) / self.blocks))


def simulate_bler(
    system: CodedLink,
    ebn0_grid: Sequence[float],
    min_errors: int = 100,
    max_blocks: int = 10 ** 6,
    seed: int = 0,
    disable_progress: bool = False,
) -> List[BlerPoint]:
    """
    Monte-Carlo BLER over an Eb/N0 grid.

    Args:
        system: Trained (or reference) link; its channel kind is kept and the
            noise variance is set per point from Eb/N0 and the link's rate
        ebn0_grid: Eb/N0 points in dB
        min_errors: Stop a point after this many block errors
        max_blocks: Stop a point after this many blocks
        seed: Base seed; point i uses seed + i

    Returns:
        One BlerPoint per grid point, in grid order
    """
    grid = [float(v) for v in ebn0_grid]
    if not grid:
        raise ValidationError("the Eb/N0 grid is empty", key="eval.ebn0_grid")
    if min_errors < 1 or max_blocks < 1:
        raise ValidationError("min_errors and max_blocks must be positive", key="eval.min_errors")

    points = []
    for index, ebn0_db in enumerate(tqdm(grid, desc="BLER", disable=disable_progress)):
        rng = np.random.default_rng(seed + index)
        link = system.with_channel(ChannelModel.from_ebn0(system.channel.kind, ebn0_db, system.rate))
        blocks = errors = 0
        constellation = codebook(link)
        with no_grad():
            while errors < min_errors and blocks < max_blocks:
                chunk = min(CHUNK_BLOCKS, max_blocks - blocks)
                messages = rng.integers(0, link.M, size=chunk)
                y = transmit(constellation[messages], link.channel, rng)
                posteriors = link.posteriors(y)
                if posteriors.shape != (chunk, link.M):
                    raise ShapeError(f"decoder returned {posteriors.shape}, expected {(chunk, link.M)}")
                errors += int(np.sum(decode_hard_batch(posteriors) != messages))
                blocks += chunk
        point = BlerPoint(ebn0_db, blocks, errors, seed + index)
        logger.info(f"Eb/N0 {ebn0_db:5.1f} dB: BLER {point.bler:.3e} ({errors}/{blocks})")
        points.append(point)
    return points


def is_monotone_non_increasing(points: Sequence[BlerPoint], sigmas: float = 2.0) -> bool:
    """Whether BLER never rises by more than `sigmas` combined standard errors between neighbours"""
    for lower, higher in zip(points, points[1:]):
        slack = sigmas * np.hypot(lower.standard_error, higher.standard_error)
        if higher.bler > lower.bler + slack:
            logger.warning(
                f"BLER rises from {lower.bler:.3e} at {lower.ebn0_db} dB to {higher.bler:.3e} at {higher.ebn0_db} dB"
            )
            return False
    return True


@dataclass
class ReferenceBpskLink:
    """
    Hand-coded antipodal M=2, n=1 link.

    Message 0 maps to +1 and message 1 to -1 on the real axis. Posteriors are
    exact for the AWGN channel: the log-odds of message 0 is 4 Re(y) / sigma^2.
    """

    channel: ChannelModel = field(default_factory=lambda: ChannelModel("AWGN", 1.0))
    M: int = 2
    n: int = 1

    @property
    def rate(self) -> float:
        return 1.0

    def encode(self, messages: Sequence[int]) -> Tensor:
        messages = np.asarray(messages, dtype=np.int64)
        if np.any((messages < 0) | (messages > 1)):
            raise ValidationError("the reference link carries messages 0 and 1 only")
        real = 1.0 - 2.0 * messages.astype(np.float64)
        return as_tensor(np.stack([real, np.zeros_like(real)], axis=1))

    def posteriors(self, y) -> Tensor:
        y = as_tensor(y)
        p0 = expit(4.0 * y.data[:, 0] / self.channel.noise_variance)
        return concat([as_tensor(p0[:, None]), as_tensor(1.0 - p0[:, None])], axis=1)

    def with_channel(self, channel: ChannelModel) -> "ReferenceBpskLink":
        return ReferenceBpskLink(channel)


def reference_bpsk_system(ebn0_db: float = 7.0) -> ReferenceBpskLink:
    return ReferenceBpskLink(ChannelModel.from_ebn0("AWGN", ebn0_db, 1.0))
