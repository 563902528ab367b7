#!/usr/bin/env python3
"""
Paired and unpaired sample construction

Unpaired (product-of-marginals) samples are built from a joint batch by
permuting the ys with a uniformly drawn derangement, so no x keeps its own
partner.
"""

import logging
from dataclasses import dataclass
from typing import Protocol, Tuple

import numpy as np

from ..diffcore import Tensor, take
from ..errors import ShapeError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)


def derangement(size: int, rng: np.random.Generator) -> np.ndarray:
    """
    Uniform random permutation of range(size) with no fixed point.

    Rejection sampling over uniform permutations; roughly e draws per result.
    """
    if size < 2:
        raise ValidationError(f"a derangement needs at least 2 elements, got {size}")
    identity = np.arange(size)
    while True:
        perm = rng.permutation(size)
        if not np.any(perm == identity):
            return perm


def make_unpaired(ys, rng: np.random.Generator):
    """
    Permute a batch of ys along the batch axis with a derangement.

    Tensors are gathered with the differentiable `take` op so gradients reach
    the ys; arrays come back as arrays.
    """
    size = ys.shape[0]
    perm = derangement(size, rng)
    if isinstance(ys, Tensor):
        return take(ys, perm, axis=0)
    return np.asarray(ys)[perm]


@dataclass
class SampleBatch:
    """Joint draws (xs[i], ys[i]) plus the deranged ys"""

    xs: np.ndarray
    ys: np.ndarray
    unpaired_ys: np.ndarray

    def __post_init__(self):
        if not (len(self.xs) == len(self.ys) == len(self.unpaired_ys)):
            raise ShapeError(
                f"batch sizes differ: {len(self.xs)} xs, {len(self.ys)} ys, {len(self.unpaired_ys)} unpaired"
            )
        if len(self.xs) < 2:
            raise ValidationError(f"a sample batch needs at least 2 pairs, got {len(self.xs)}")

    @property
    def size(self) -> int:
        return len(self.xs)

    @classmethod
    def from_joint(cls, xs: np.ndarray, ys: np.ndarray, rng: np.random.Generator) -> "SampleBatch":
        xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
        ys = np.atleast_2d(np.asarray(ys, dtype=np.float64))
        return cls(xs, ys, make_unpaired(ys, rng))


class BatchSource(Protocol):
    """Anything that draws joint (x, y) batches"""

    def sample(self, batch_size: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        ...
