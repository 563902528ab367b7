#!/usr/bin/env python3
"""
Exact expectations for small discrete joints

Enumerates every (x, y) cell of a joint pmf so value functions can be
evaluated as exact expectations: paired weights are p(x, y), unpaired
weights p(x) p(y). Used to check that each estimator's analytic optimum
reproduces the true mutual information.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from ..errors import ValidationError

# Set up logging
logger = logging.getLogger(__name__)


@dataclass
class DiscreteJointTerms:
    """Flattened cells of a joint pmf"""

    paired_weights: np.ndarray
    unpaired_weights: np.ndarray
    ratio: np.ndarray

    @property
    def mutual_information(self) -> float:
        return float(np.sum(xlogy(self.paired_weights, self.ratio)))


def _check_pmf(pmf: np.ndarray) -> np.ndarray:
    pmf = np.asarray(pmf, dtype=np.float64)
    if pmf.ndim != 2 or np.any(pmf < 0) or not np.isclose(pmf.sum(), 1.0, atol=1e-12):
        raise ValidationError("joint pmf must be a non-negative 2-D table summing to 1")
    if np.any(pmf.sum(axis=1) == 0) or np.any(pmf.sum(axis=0) == 0):
        raise ValidationError("joint pmf has an empty row or column")
    return pmf


def discrete_joint_terms(pmf) -> DiscreteJointTerms:
    pmf = _check_pmf(pmf)
    product = np.outer(pmf.sum(axis=1), pmf.sum(axis=0))
    logger.debug(f"Enumerated {pmf.size} cells of a {pmf.shape[0]}x{pmf.shape[1]} joint")
    return DiscreteJointTerms(pmf.reshape(-1), product.reshape(-1), (pmf / product).reshape(-1))


def discrete_mi(pmf) -> float:
    """Brute-force sum over all cells of p log(p / (p_x p_y)), in nats"""
    pmf = _check_pmf(pmf)
    product = np.outer(pmf.sum(axis=1), pmf.sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(np.sum(xlogy(pmf, pmf) - xlogy(pmf, product)))
