#!/usr/bin/env python3
"""
Value landscape of the gamma-DIME functional

Per-sample value (gamma R log D - D^gamma) / gamma as a function of the
discriminator output D for a fixed density ratio R; it peaks at
D = R^(1/gamma).
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..errors import ValidationError

# Set up logging
logger = logging.getLogger(__name__)

DEFAULT_D_MAX = 3.0
DEFAULT_D_STEP = 1e-3


def default_d_grid(d_max: float = DEFAULT_D_MAX, step: float = DEFAULT_D_STEP) -> np.ndarray:
    """step, 2 step, ..., d_max"""
    if not d_max > 0 or not step > 0:
        raise ValidationError(f"grid needs positive d_max and step, got {d_max}, {step}")
    count = int(round(d_max / step))
    return step * np.arange(1, count + 1)


@dataclass
class LandscapeCurve:
    gamma: float
    ratio: float
    d: np.ndarray
    values: np.ndarray

    @property
    def d_max(self) -> float:
        """Grid point with the largest value (first one on ties)"""
        return float(self.d[int(np.argmax(self.values))])

    @property
    def max_value(self) -> float:
        return float(np.max(self.values))

    @property
    def analytic_d_max(self) -> float:
        return float(self.ratio ** (1.0 / self.gamma))


def value_landscape(gammas: Sequence[float], ratio: float = 1.0, d_grid=None) -> List[LandscapeCurve]:
    """
    One curve per gamma over the D grid.

    Raises:
        ValidationError: empty gamma list, gamma or ratio not positive, or a
            grid point that is not positive
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValidationError("at least one gamma is required", key="gamma")
    if not ratio > 0:
        raise ValidationError(f"must be positive, got {ratio}", key="ratio")
    d = default_d_grid() if d_grid is None else np.asarray(d_grid, dtype=np.float64)
    if d.size == 0 or np.any(d <= 0):
        raise ValidationError("the D grid must be nonempty and positive", key="d_grid")

    curves = []
    for gamma in gammas:
        if not gamma > 0:
            raise ValidationError(f"must be positive, got {gamma}", key="gamma")
        values = (gamma * ratio * np.log(d) - d ** gamma) / gamma
        curve = LandscapeCurve(gamma, float(ratio), d, values)
        logger.debug(f"gamma={gamma:g}, R={ratio:g}: max {curve.max_value:.5f} at D={curve.d_max:.4f}")
        curves.append(curve)
    return curves
