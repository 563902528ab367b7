#!/usr/bin/env python3
"""
Autoencoder loss

Cross-entropy against label-smoothed targets, minus beta times the
estimator's value function (the mutual-information regularizer). With
beta = 0 and epsilon = 0 this is plain categorical cross-entropy.
"""

import logging
from typing import Sequence

import numpy as np

from ..diffcore import Tensor, as_tensor, log, mean, mul, reduce_sum, scale, sub
from ..errors import ShapeError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)


def smoothed_targets(s: int, epsilon: float, M: int) -> np.ndarray:
    """(1 - epsilon) one_hot(s) + epsilon / M"""
    if not 0 <= s < M:
        raise ValidationError(f"message {s} outside 0..{M - 1}")
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon}", key="loss.epsilon")
    target = np.full(M, epsilon / M)
    target[s] += 1.0 - epsilon
    return target


def smoothed_target_batch(messages: Sequence[int], epsilon: float, M: int) -> np.ndarray:
    messages = np.asarray(messages, dtype=np.int64)
    if np.any(messages < 0) or np.any(messages >= M):
        raise ValidationError(f"messages outside 0..{M - 1}")
    targets = np.full((messages.size, M), epsilon / M)
    targets[np.arange(messages.size), messages] += 1.0 - epsilon
    return targets


def cross_entropy(posteriors, targets) -> Tensor:
    """Batch mean of -sum_k targets_k log posteriors_k (log floored)"""
    posteriors = as_tensor(posteriors)
    targets = np.asarray(targets, dtype=np.float64)
    if posteriors.shape != targets.shape:
        raise ShapeError(f"posteriors {posteriors.shape} and targets {targets.shape} differ")
    return scale(mean(reduce_sum(mul(log(posteriors), targets), axis=1)), -1.0)


def ae_loss(posteriors, targets, mi_term, beta: float) -> Tensor:
    """
    Regularized loss: cross-entropy - beta * mi_term.

    Args:
        posteriors: Decoder output rows
        targets: Smoothed target rows
        mi_term: Estimator value function on (x, y), discriminator frozen
        beta: Regularizer weight (>= 0); the term is skipped when 0

    Returns:
        Scalar loss
    """
    if beta < 0:
        raise ValidationError(f"beta must be non-negative, got {beta}", key="loss.beta")
    ce = cross_entropy(posteriors, targets)
    if beta == 0 or mi_term is None:
        return ce
    return sub(ce, scale(mi_term, beta))


def decode_hard(posterior_row) -> int:
    """Most probable message; ties go to the lowest index"""
    return int(np.argmax(np.asarray(posterior_row)))


def decode_hard_batch(posteriors) -> np.ndarray:
    return np.argmax(as_tensor(posteriors).data, axis=1)
