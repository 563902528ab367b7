#!/usr/bin/env python3
"""
Estimator specifications

An EstimatorSpec names the estimator kind and carries its hyperparameters,
training length and optimizer settings. Specs can be written compactly as
"KIND" or "KIND:param" (e.g. "gammaDIME:0.5", "SMILE:5", "fDIME:GAN").
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

from ..diffcore import OptimizerConfig
from ..errors import ValidationError
from .generators import GENERATOR_NAMES, FGenerator, f_generator

# Set up logging
logger = logging.getLogger(__name__)

ESTIMATOR_KINDS = ("MINE", "NWJ", "SMILE", "dDIME", "fDIME", "gammaDIME")
DIME_KINDS = ("dDIME", "fDIME", "gammaDIME")
_ALIASES = {"γDIME": "gammaDIME", "gDIME": "gammaDIME", "d-DIME": "dDIME", "f-DIME": "fDIME"}


@dataclass(frozen=True)
class EstimatorSpec:
    """
    Estimator kind and hyperparameters.

    Attributes:
        kind: One of ESTIMATOR_KINDS
        alpha: d-DIME scale
        gamma: gamma-DIME exponent (also the scaled-KL generator's gamma)
        tau: SMILE clipping threshold
        ema_rate: MINE moving-average rate for the gradient denominator
        generator: f-DIME generator name
        iterations: Training iterations
        batch_size: Joint samples per iteration
        hidden_units: Width of each of the two hidden layers
        optimizer: Optimizer settings
        log_every: Trace sampling period
        smoothing_window: Trailing window of the final smoothed estimate
    """

    kind: str = "gammaDIME"
    alpha: float = 1.0
    gamma: float = 1.0
    tau: float = 5.0
    ema_rate: float = 0.99
    generator: str = "KL"
    iterations: int = 10000
    batch_size: int = 512
    hidden_units: int = 200
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    log_every: int = 10
    smoothing_window: int = 500

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in ESTIMATOR_KINDS:
            raise ValidationError(f"unknown estimator '{self.kind}', expected one of {ESTIMATOR_KINDS}", key="estimator.kind")
        object.__setattr__(self, "kind", kind)
        if not self.alpha > 0:
            raise ValidationError(f"must be positive, got {self.alpha}", key="estimator.alpha")
        if not self.gamma > 0:
            raise ValidationError(f"must be positive, got {self.gamma}", key="estimator.gamma")
        if not self.tau >= 0:
            raise ValidationError(f"must be non-negative, got {self.tau}", key="estimator.tau")
        if not 0.0 < self.ema_rate < 1.0:
            raise ValidationError(f"must lie in (0, 1), got {self.ema_rate}", key="estimator.ema_rate")
        if self.generator not in GENERATOR_NAMES:
            raise ValidationError(f"unknown generator '{self.generator}', expected one of {GENERATOR_NAMES}",
                                  key="estimator.generator")
        if self.iterations < 1:
            raise ValidationError(f"must be at least 1, got {self.iterations}", key="training.iterations")
        if self.batch_size < 2:
            raise ValidationError(f"must be at least 2, got {self.batch_size}", key="training.batch")
        if self.hidden_units < 1:
            raise ValidationError(f"must be at least 1, got {self.hidden_units}", key="estimator.hidden_units")
        if self.log_every < 1 or self.smoothing_window < 1:
            raise ValidationError("log_every and smoothing_window must be at least 1", key="training.log_every")

    @property
    def is_dime(self) -> bool:
        return self.kind in DIME_KINDS

    @property
    def label(self) -> str:
        """Compact name used in result files"""
        if self.kind == "gammaDIME":
            return f"gammaDIME:{self.gamma:g}"
        if self.kind == "dDIME":
            return f"dDIME:{self.alpha:g}"
        if self.kind == "SMILE":
            return f"SMILE:{self.tau:g}"
        if self.kind == "fDIME":
            return f"fDIME:{self.generator}"
        return self.kind

    def f_generator(self) -> Optional[FGenerator]:
        if self.kind != "fDIME":
            return None
        return f_generator(self.generator, self.gamma)

    def maximizes_mutual_information(self) -> bool:
        """Whether pushing this value function up over p_X pushes I(X;Y) up"""
        if self.kind != "fDIME":
            return True
        return self.f_generator().kl_family


def parse_estimator(text: str, base: Optional[EstimatorSpec] = None) -> EstimatorSpec:
    """
    Parse "KIND" or "KIND:param" on top of a base spec.

    The parameter is gamma for gammaDIME, alpha for dDIME, tau for SMILE and
    the generator name for fDIME.
    """
    base = base or EstimatorSpec()
    kind, _, param = text.strip().partition(":")
    kind = _ALIASES.get(kind, kind)
    if not param:
        return replace(base, kind=kind)
    try:
        if kind == "gammaDIME":
            return replace(base, kind=kind, gamma=float(param))
        if kind == "dDIME":
            return replace(base, kind=kind, alpha=float(param))
        if kind == "SMILE":
            return replace(base, kind=kind, tau=float(param))
    except ValueError:
        raise ValidationError(f"bad parameter in '{text}'", key="estimator") from None
    if kind == "fDIME":
        return replace(base, kind=kind, generator=param)
    raise ValidationError(f"'{text}': {kind} takes no parameter", key="estimator")
