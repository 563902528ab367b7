#!/usr/bin/env python3
"""
Capacity-driven autoencoder training

Each iteration draws uniform messages, encodes, normalizes and transmits
them, updates the discriminator on the detached (x, y) pairs, then updates
encoder and decoder on the regularized loss with the discriminator frozen.
The value function's gradient reaches the encoder through x and y.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..channel import CHANNEL_KINDS, ChannelModel, ebn0_to_noise_variance, symbol_power, transmit
from ..diffcore import OptimizerConfig, backward, no_grad, optimizer_step, zero_grads
from ..errors import DivergenceError, DomainError, NonFiniteError, ValidationError
from ..estimators import EstimatorSpec, EstimatorTrace, EstimatorTrainer
from .link_system import DecoderNet, EncoderNet, LinkSystem
from .loss import ae_loss, cross_entropy, decode_hard_batch, smoothed_target_batch

# Set up logging
logger = logging.getLogger(__name__)

POWER_TOLERANCE = 1e-9
# Estimates above ln M by more than this are flagged
ENTROPY_MARGIN_NATS = 0.1


@dataclass(frozen=True)
class AEConfig:
    """
    Autoencoder run settings.

    Attributes:
        M: Alphabet size (a power of two gives an integer k = log2 M)
        n: Complex channel uses per message
        beta: Weight of the mutual-information regularizer (nats)
        epsilon: Label-smoothing weight in [0, 1)
        train_ebn0_db: Eb/N0 of the training channel
        channel_kind: "AWGN" or "Rayleigh"
        iterations: Alternating iterations
        batch_size: Messages per iteration
        estimator: Discriminator settings (its iterations field is unused here)
        optimizer: Encoder/decoder optimizer
        discriminator_steps: Discriminator updates per autoencoder update
        per_codeword_power: Normalize each codeword instead of the batch average
        noise_variance: Overrides the Eb/N0-derived noise variance when set
        log_every: Report sampling period
    """

    M: int = 64
    n: int = 3
    beta: float = 0.2
    epsilon: float = 0.2
    train_ebn0_db: float = 7.0
    channel_kind: str = "AWGN"
    iterations: int = 10000
    batch_size: int = 512
    estimator: EstimatorSpec = field(default_factory=EstimatorSpec)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    discriminator_steps: int = 1
    per_codeword_power: bool = False
    noise_variance: Optional[float] = None
    log_every: int = 10

    def __post_init__(self):
        if self.M < 2:
            raise ValidationError(f"must be at least 2, got {self.M}", key="system.M")
        if self.n < 1:
            raise ValidationError(f"must be at least 1, got {self.n}", key="system.n")
        if not self.beta >= 0:
            raise ValidationError(f"must be non-negative, got {self.beta}", key="loss.beta")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValidationError(f"must lie in [0, 1), got {self.epsilon}", key="loss.epsilon")
        if self.iterations < 1:
            raise ValidationError(f"must be at least 1, got {self.iterations}", key="training.iterations")
        if self.batch_size < 2:
            raise ValidationError(f"must be at least 2, got {self.batch_size}", key="training.batch")
        if self.discriminator_steps < 1:
            raise ValidationError(f"must be at least 1, got {self.discriminator_steps}", key="training.discriminator_steps")
        if self.channel_kind not in CHANNEL_KINDS:
            raise ValidationError(f"unknown channel '{self.channel_kind}', expected one of {CHANNEL_KINDS}", key="channel.kind")
        if self.noise_variance is not None and not self.noise_variance > 0:
            raise ValidationError(f"must be positive, got {self.noise_variance}", key="channel.noise_variance")
        if not self.estimator.maximizes_mutual_information():
            raise ValidationError(
                f"fDIME with the {self.estimator.generator} generator cannot drive capacity: "
                "only KL-family value functions maximize I(X;Y)",
                key="estimator.generator",
            )
        if self.M & (self.M - 1):
            logger.warning(f"M={self.M} is not a power of two; log2(M) is not an integer bit count")

    @property
    def rate(self) -> float:
        return float(np.log2(self.M) / self.n)

    def channel_model(self) -> ChannelModel:
        variance = self.noise_variance
        if variance is None:
            variance = ebn0_to_noise_variance(self.train_ebn0_db, self.rate)
        return ChannelModel(self.channel_kind, variance)


@dataclass
class AEReportRow:
    iteration: int
    loss: float
    cross_entropy: float
    mi_nats: float
    mi_bits: float
    bler: float


@dataclass
class AETrainingReport:
    """Loss, MI and training BLER traces of one autoencoder run"""

    rate: float
    rows: List[AEReportRow] = field(default_factory=list)
    estimator_trace: Optional[EstimatorTrace] = None

    @property
    def final(self) -> AEReportRow:
        return self.rows[-1]

    def trailing_bler(self, rows: int = 50) -> float:
        return float(np.mean([r.bler for r in self.rows[-rows:]]))

    @property
    def smoothed_mi_bits(self) -> float:
        return self.estimator_trace.smoothed_mi_bits if self.estimator_trace else float("nan")


def check_power_constraint(x, per_codeword: bool) -> None:
    powers = symbol_power(x)
    worst = np.max(np.abs(powers - 1.0)) if per_codeword else abs(np.mean(powers) - 1.0)
    if worst > POWER_TOLERANCE:
        raise DivergenceError(f"encoder output violates the power constraint by {worst:.3e}")


def train_autoencoder(
    config: AEConfig,
    rng: np.random.Generator,
    disable_progress: bool = False,
) -> Tuple[LinkSystem, AETrainingReport]:
    """
    Train encoder, decoder and discriminator by alternating updates.

    Args:
        config: Run settings
        rng: Drives init, messages, channel noise and derangements
        disable_progress: Hide the progress bar

    Returns:
        (trained link, training report)

    Raises:
        DivergenceError: loss or estimate became non-finite
    """
    channel = config.channel_model()
    encoder = EncoderNet(config.M, config.n, rng, config.per_codeword_power)
    decoder = DecoderNet(config.M, config.n, rng)
    estimator = EstimatorTrainer(config.estimator, 2 * config.n, 2 * config.n, rng)
    system = LinkSystem(encoder, decoder, channel)

    ae_params = system.parameters()
    disc_params = estimator.parameters()
    spec = config.estimator
    trace = EstimatorTrace(spec.label, config.log_every, spec.smoothing_window)
    report = AETrainingReport(rate=config.rate, estimator_trace=trace)
    entropy_nats = float(np.log(config.M))

    logger.info(
        f"Training AE(M={config.M}, n={config.n}) at R={config.rate:.4f} on {channel.kind} "
        f"(sigma^2={channel.noise_variance:.5f}), beta={config.beta}, epsilon={config.epsilon}, "
        f"estimator {spec.label}"
    )

    last_loss = float("nan")
    for iteration in tqdm(range(1, config.iterations + 1), desc="AE", disable=disable_progress):
        try:
            messages = rng.integers(0, config.M, size=config.batch_size)
            x = system.encode(messages)
            check_power_constraint(x, config.per_codeword_power)
            y = transmit(x, channel, rng)

            # discriminator phase on detached pairs
            disc = estimator.step(x.data, y.data, rng)
            for _ in range(config.discriminator_steps - 1):
                with no_grad():
                    extra = rng.integers(0, config.M, size=config.batch_size)
                    x_extra = system.encode(extra)
                    y_extra = transmit(x_extra, channel, rng)
                disc = estimator.step(x_extra.data, y_extra.data, rng)

            # autoencoder phase with the discriminator frozen
            posteriors = system.posteriors(y)
            targets = smoothed_target_batch(messages, config.epsilon, config.M)
            mi_term = estimator.value_function(x, y, rng) if config.beta > 0 else None
            loss = ae_loss(posteriors, targets, mi_term, config.beta)
            zero_grads(ae_params + disc_params)
            backward(loss)
            optimizer_step(ae_params, config.optimizer)
            zero_grads(disc_params)
        except (NonFiniteError, DomainError) as e:
            raise DivergenceError(f"autoencoder training diverged: {e}", iteration, last_loss) from e

        loss_value = loss.item()
        if not np.isfinite(loss_value) or not np.isfinite(disc.mi_nats):
            raise DivergenceError("autoencoder loss became non-finite", iteration, last_loss)
        last_loss = loss_value
        trace.record(iteration, disc, disc.clip_events)

        if iteration % config.log_every == 0:
            ce = cross_entropy(posteriors.detach(), targets).item()
            bler = float(np.mean(decode_hard_batch(posteriors) != messages))
            report.rows.append(AEReportRow(iteration, loss_value, ce, disc.mi_nats, disc.mi_nats / np.log(2.0), bler))
            logger.debug(f"AE iter {iteration}: loss {loss_value:.5f}, MI {disc.mi_nats:.4f} nats, BLER {bler:.4f}")
            if trace.smoothed_mi_nats > entropy_nats + ENTROPY_MARGIN_NATS:
                logger.warning(
                    f"MI estimate {trace.smoothed_mi_nats:.4f} nats exceeds the source entropy ln M = {entropy_nats:.4f}"
                )

    if not report.rows:
        ce = cross_entropy(posteriors.detach(), targets).item()
        bler = float(np.mean(decode_hard_batch(posteriors) != messages))
        report.rows.append(AEReportRow(config.iterations, last_loss, ce, disc.mi_nats, disc.mi_nats / np.log(2.0), bler))

    logger.info(
        f"AE training done: loss {report.final.loss:.5f}, training BLER {report.trailing_bler():.4f}, "
        f"MI {trace.smoothed_mi_bits:.4f} bits (R={config.rate:.4f})"
    )
    return system, report
