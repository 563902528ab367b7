#!/usr/bin/env python3
"""
Estimator training

EstimatorTrainer owns one discriminator and knows how to turn its outputs
into the estimator's value function, its training objective and its mutual
information estimate. `train_estimator` runs gradient ascent on batches from
a BatchSource and records a trace.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..diffcore import Tensor, as_tensor, backward, optimizer_step, scale, sub, take, zero_grads
from ..errors import DivergenceError, DomainError, NonFiniteError
from .discriminator import DiscriminatorNet
from .sampling import BatchSource, derangement
from .spec import EstimatorSpec
from .value_functions import (
    ClipCounter,
    direct_gamma_estimate,
    estimate_ddime,
    estimate_fdime,
    estimate_gamma,
    expectation,
    guarded_exp,
    value_ddime,
    value_fdime,
    value_gamma,
    value_mine,
    value_nwj,
    value_smile,
)

# Set up logging
logger = logging.getLogger(__name__)

LN2 = float(np.log(2.0))


class EmaDenominator:
    """
    Moving average of E_Q[e^T] for MINE's gradient correction.

    Starts at zero and divides by (1 - rate^steps), so early values are not
    biased toward the zero start.
    """

    def __init__(self, rate: float = 0.99):
        self.rate = rate
        self.value = 0.0
        self.steps = 0

    def update(self, batch_mean: float) -> float:
        self.steps += 1
        self.value = self.rate * self.value + (1.0 - self.rate) * batch_mean
        return self.value / (1.0 - self.rate ** self.steps)


@dataclass
class StepResult:
    value: float
    mi_nats: float
    clip_events: int
    direct_mi_nats: Optional[float] = None


@dataclass
class TraceRow:
    iteration: int
    value: float
    mi_nats: float
    mi_bits: float
    clip_events: int


@dataclass
class EstimatorTrace:
    """
    Sampled training trace plus a trailing-mean smoother.

    Rows are kept every `log_every` iterations; the smoother sees every
    iteration.
    """

    estimator: str
    log_every: int = 10
    smoothing_window: int = 500
    rows: List[TraceRow] = field(default_factory=list)
    direct_mi_nats: List[float] = field(default_factory=list)
    _window: Deque[float] = field(default_factory=deque, repr=False)

    def record(self, iteration: int, result: StepResult, clip_total: int) -> None:
        self._window.append(result.mi_nats)
        while len(self._window) > self.smoothing_window:
            self._window.popleft()
        if iteration % self.log_every == 0:
            self.rows.append(TraceRow(iteration, result.value, result.mi_nats, result.mi_nats / LN2, clip_total))
            if result.direct_mi_nats is not None:
                self.direct_mi_nats.append(result.direct_mi_nats)

    @property
    def smoothed_mi_nats(self) -> float:
        if not self._window:
            return float("nan")
        return float(np.mean(self._window))

    @property
    def smoothed_mi_bits(self) -> float:
        return self.smoothed_mi_nats / LN2

    @property
    def clip_events(self) -> int:
        return self.rows[-1].clip_events if self.rows else 0


class EstimatorTrainer:
    """
    One discriminator trained to maximize an estimator's value function.

    Args:
        spec: Estimator kind, hyperparameters and training settings
        x_dim: Dimension of x
        y_dim: Dimension of y
        rng: Generator used for weight init
    """

    def __init__(self, spec: EstimatorSpec, x_dim: int, y_dim: int, rng: np.random.Generator):
        self.spec = spec
        self.generator = spec.f_generator()
        self.net = DiscriminatorNet(x_dim, y_dim, spec, rng)
        self.ema = EmaDenominator(spec.ema_rate) if spec.kind == "MINE" else None
        self.clip_counter = ClipCounter()

    def parameters(self):
        return self.net.parameters()

    def scores(self, xs, ys, rng: np.random.Generator) -> Tuple[Tensor, Tensor]:
        """Discriminator outputs on the paired batch and on its deranged view"""
        ys = as_tensor(ys)
        perm = derangement(ys.shape[0], rng)
        return self.net(xs, ys), self.net(xs, take(ys, perm, axis=0))

    def value(self, paired: Tensor, unpaired: Tensor, count_clips: bool = True) -> Tensor:
        """
        The estimator's value function on precomputed scores.

        Clamped exponentials count toward the trace's clip events only when
        count_clips is set.
        """
        spec = self.spec
        counter = self.clip_counter if count_clips else None
        if spec.kind == "MINE":
            return value_mine(paired, unpaired, counter=counter)
        if spec.kind == "NWJ":
            return value_nwj(paired, unpaired, counter=counter)
        if spec.kind == "SMILE":
            return value_smile(paired, unpaired, spec.tau, counter=counter)
        if spec.kind == "dDIME":
            return value_ddime(paired, unpaired, spec.alpha)
        if spec.kind == "fDIME":
            return value_fdime(paired, unpaired, self.generator)
        return value_gamma(paired, unpaired, spec.gamma)

    def value_function(self, xs, ys, rng: np.random.Generator) -> Tensor:
        """Value function on a joint batch; differentiable in xs, ys and the net"""
        return self.value(*self.scores(xs, ys, rng), count_clips=False)

    def objective(self, paired: Tensor, unpaired: Tensor) -> Tensor:
        """
        What gradient ascent climbs.

        For MINE the log-denominator's gradient uses the moving average of
        E_Q[e^T] instead of the batch value; every other estimator climbs its
        value function directly.
        """
        if self.ema is None:
            return self.value(paired, unpaired)
        exp_unpaired = expectation(guarded_exp(unpaired, self.clip_counter))
        denominator = self.ema.update(exp_unpaired.item())
        return sub(expectation(paired), scale(exp_unpaired, 1.0 / denominator))

    def mi_estimate(self, value: float, paired: Tensor) -> float:
        """Mutual information in nats from a value and the paired scores"""
        kind = self.spec.kind
        if kind == "dDIME":
            return estimate_ddime(value, self.spec.alpha)
        if kind == "fDIME":
            return estimate_fdime(paired, self.generator)
        if kind == "gammaDIME":
            return estimate_gamma(value)
        return float(value)

    def step(self, xs, ys, rng: np.random.Generator) -> StepResult:
        """One ascent step on a joint batch of arrays"""
        paired, unpaired = self.scores(xs, ys, rng)
        params = self.parameters()
        zero_grads(params)
        objective = self.objective(paired, unpaired)
        backward(scale(objective, -1.0))
        optimizer_step(params, self.spec.optimizer)

        if self.ema is None:
            value = objective.item()
        else:
            value = value_mine(paired.detach(), unpaired.detach()).item()
        direct = None
        if self.spec.kind == "gammaDIME":
            direct = direct_gamma_estimate(paired, self.spec.gamma)
        return StepResult(value, self.mi_estimate(value, paired.detach()), self.clip_counter.events, direct)


def train_estimator(
    spec: EstimatorSpec,
    sampler: BatchSource,
    rng: np.random.Generator,
    trainer: Optional[EstimatorTrainer] = None,
    disable_progress: bool = False,
) -> Tuple[EstimatorTrainer, EstimatorTrace]:
    """
    Train a discriminator by gradient ascent on the spec's value function.

    Args:
        spec: Estimator and training settings
        sampler: Source of joint (x, y) batches
        rng: Drives weight init, batches and derangements
        trainer: Existing trainer to continue (warm start); a new one is built when None
        disable_progress: Hide the progress bar

    Returns:
        (trainer holding the trained discriminator, training trace)

    Raises:
        DivergenceError: the value became non-finite
    """
    xs, ys = sampler.sample(spec.batch_size, rng)
    if trainer is None:
        trainer = EstimatorTrainer(spec, xs.shape[1], ys.shape[1], rng)
    trace = EstimatorTrace(spec.label, spec.log_every, spec.smoothing_window)
    logger.info(f"Training {spec.label} for {spec.iterations} iterations (batch {spec.batch_size})")

    last_finite = float("nan")
    for iteration in tqdm(range(1, spec.iterations + 1), desc=spec.label, disable=disable_progress, leave=False):
        if iteration > 1:
            xs, ys = sampler.sample(spec.batch_size, rng)
        try:
            result = trainer.step(xs, ys, rng)
        except (NonFiniteError, DomainError) as e:
            raise DivergenceError(f"{spec.label} diverged: {e}", iteration, last_finite) from e
        if not (np.isfinite(result.value) and np.isfinite(result.mi_nats)):
            raise DivergenceError(f"{spec.label} produced a non-finite value", iteration, last_finite)
        last_finite = result.value
        trace.record(iteration, result, result.clip_events)
        if iteration % spec.log_every == 0:
            logger.debug(f"{spec.label} iter {iteration}: value {result.value:.5f}, MI {result.mi_nats:.5f} nats")

    if trainer.clip_counter.events:
        logger.warning(f"{spec.label}: {trainer.clip_counter.events} exp arguments clamped during training")
    logger.info(f"{spec.label} finished: smoothed MI {trace.smoothed_mi_nats:.4f} nats ({trace.smoothed_mi_bits:.4f} bits)")
    return trainer, trace
