#!/usr/bin/env python3
"""
Gradient-check suite

Named finite-difference checks over every diffcore op, every value function
and an end-to-end autoencoder loss. Each case builds fresh inputs from a
generator and returns a deterministic forward closure plus the leaves to
perturb. Non-scalar op outputs are reduced against fixed random weights so
the whole Jacobian is exercised.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .. import diffcore as dc
from ..autoencoder import DecoderNet, EncoderNet, ae_loss, smoothed_target_batch
from ..channel import ChannelModel, normalize_power, transmit
from ..diffcore import GradCheckReport, Parameter, Tensor, gradient_check
from ..estimators import (
    EstimatorSpec,
    EstimatorTrainer,
    f_generator,
    value_ddime,
    value_fdime,
    value_gamma,
    value_mine,
    value_nwj,
    value_smile,
)

# Set up logging
logger = logging.getLogger(__name__)

Build = Callable[[], Tensor]
CaseFactory = Callable[[np.random.Generator], Tuple[Build, List[Parameter]]]


@dataclass(frozen=True)
class GradCheckCase:
    name: str
    factory: CaseFactory


def _param(rng: np.random.Generator, shape, lo: float = -1.0, hi: float = 1.0, name: str = "p") -> Parameter:
    return Parameter(rng.uniform(lo, hi, size=shape), name=name)


def _projected(out: Tensor, weights: np.ndarray) -> Tensor:
    return dc.reduce_sum(dc.mul(out, weights))


def _unary(op: Callable[[Tensor], Tensor], lo: float = -1.0, hi: float = 1.0, shape=(4, 3)) -> CaseFactory:
    def factory(rng):
        a = _param(rng, shape, lo, hi, "a")
        w = rng.standard_normal(shape)
        return (lambda: _projected(op(a), w)), [a]

    return factory


def _binary(op: Callable[[Tensor, Tensor], Tensor], b_shape=(4, 3), b_lo: float = -1.0) -> CaseFactory:
    def factory(rng):
        a = _param(rng, (4, 3), name="a")
        b = _param(rng, b_shape, b_lo, 1.0 if b_lo < 0 else b_lo + 1.5, "b")
        out_shape = np.broadcast_shapes((4, 3), b_shape)
        w = rng.standard_normal(out_shape)
        return (lambda: _projected(op(a, b), w)), [a, b]

    return factory


def _away_from(value: float, margin: float = 0.1) -> Callable[[np.ndarray], np.ndarray]:
    def shift(x: np.ndarray) -> np.ndarray:
        return np.where(np.abs(x - value) < margin, x + 2 * margin, x)

    return shift


def _leaky_case(rng):
    a = Parameter(_away_from(0.0)(rng.uniform(-1, 1, (4, 3))), name="a")
    w = rng.standard_normal((4, 3))
    return (lambda: _projected(dc.leaky_relu(a, 0.2), w)), [a]


def _clip_case(rng):
    a = Parameter(_away_from(0.5)(_away_from(-0.5)(rng.uniform(-1, 1, (4, 3)))), name="a")
    w = rng.standard_normal((4, 3))
    return (lambda: _projected(dc.clip(a, -0.5, 0.5), w)), [a]


def _matmul_case(rng):
    a, b = _param(rng, (4, 3), name="a"), _param(rng, (3, 2), name="b")
    w = rng.standard_normal((4, 2))
    return (lambda: _projected(dc.matmul(a, b), w)), [a, b]


def _bias_add_case(rng):
    x, bias = _param(rng, (4, 3), name="x"), _param(rng, (3,), name="bias")
    w = rng.standard_normal((4, 3))
    return (lambda: _projected(dc.bias_add(x, bias), w)), [x, bias]


def _nll_case(rng):
    a = _param(rng, (5, 4), name="logits")
    targets = rng.integers(0, 4, size=5)
    return (lambda: dc.nll(dc.softmax(a), targets)), [a]


def _concat_case(rng):
    a, b = _param(rng, (4, 2), name="a"), _param(rng, (4, 3), name="b")
    w = rng.standard_normal((4, 5))
    return (lambda: _projected(dc.concat([a, b], axis=1), w)), [a, b]


def _take_case(rng):
    a = _param(rng, (5, 3), name="a")
    indices = np.array([4, 0, 0, 2, 1, 3])
    w = rng.standard_normal((6, 3))
    return (lambda: _projected(dc.take(a, indices, axis=0), w)), [a]


def _reduction_case(op, axis):
    def factory(rng):
        a = _param(rng, (4, 3), name="a")
        w = rng.standard_normal((4,) if axis == 1 else (3,))
        return (lambda: _projected(op(a, axis=axis), w)), [a]

    return factory


def _mlp_case(rng):
    net = dc.MLP([3, 5, 2], rng, name="mlp")
    x = rng.standard_normal((6, 3))
    w = rng.standard_normal((6, 2))
    return (lambda: _projected(net(x), w)), net.parameters()


def _normalize_case(per_codeword: bool) -> CaseFactory:
    def factory(rng):
        x = _param(rng, (5, 4), name="x")
        w = rng.standard_normal((5, 4))
        return (lambda: _projected(normalize_power(x, per_codeword), w)), [x]

    return factory


def _rayleigh_case(rng):
    x = _param(rng, (5, 4), name="x")
    w = rng.standard_normal((5, 4))
    channel = ChannelModel("Rayleigh", 0.3)

    def build():
        return _projected(transmit(x, channel, np.random.default_rng(11)), w)

    return build, [x]


def _scores(rng, lo=-1.0, hi=1.0, batch: int = 8) -> Tuple[Parameter, Parameter]:
    return _param(rng, (batch, 1), lo, hi, "t_paired"), _param(rng, (batch, 1), lo, hi, "t_unpaired")


def _value_case(value: Callable[[Tensor, Tensor], Tensor], lo: float = -1.0, hi: float = 1.0) -> CaseFactory:
    def factory(rng):
        tp, tu = _scores(rng, lo, hi)
        return (lambda: value(tp, tu)), [tp, tu]

    return factory


def _smile_case(tau: float) -> CaseFactory:
    def factory(rng):
        tp, tu = _scores(rng, -2.0, 2.0)
        tu.data = _away_from(tau)(_away_from(-tau)(tu.data))
        return (lambda: value_smile(tp, tu, tau)), [tp, tu]

    return factory


def _fdime_case(name: str, gamma: float = 1.0) -> CaseFactory:
    generator = f_generator(name, gamma)
    lo, hi = (-2.0, -0.2) if name == "GAN" else (-1.0, 1.0)
    return _value_case(lambda tp, tu: value_fdime(tp, tu, generator), lo, hi)


def _discriminator_case(kind: str, **params) -> CaseFactory:
    def factory(rng):
        spec = EstimatorSpec(kind=kind, hidden_units=4, **params)
        trainer = EstimatorTrainer(spec, 2, 2, rng)
        xs = rng.standard_normal((6, 2))
        ys = xs + 0.5 * rng.standard_normal((6, 2))

        def build():
            return trainer.value_function(xs, ys, np.random.default_rng(5))

        return build, trainer.parameters()

    return factory


def _ae_loss_case(rng):
    M, n = 4, 1
    encoder = EncoderNet(M, n, rng)
    decoder = DecoderNet(M, n, rng)
    trainer = EstimatorTrainer(EstimatorSpec(kind="gammaDIME", hidden_units=3), 2 * n, 2 * n, rng)
    messages = np.array([0, 1, 2, 3, 1, 2])
    targets = smoothed_target_batch(messages, 0.2, M)
    channel = ChannelModel("AWGN", 0.2)

    def build():
        local = np.random.default_rng(3)
        x = encoder(messages)
        y = transmit(x, channel, local)
        return ae_loss(decoder(y), targets, trainer.value_function(x, y, local), 0.2)

    return build, encoder.parameters() + decoder.parameters()


def default_cases() -> List[GradCheckCase]:
    cases = [
        GradCheckCase("add", _binary(dc.add)),
        GradCheckCase("add_broadcast", _binary(dc.add, b_shape=(1, 3))),
        GradCheckCase("bias_add", _bias_add_case),
        GradCheckCase("sub", _binary(dc.sub)),
        GradCheckCase("mul", _binary(dc.mul)),
        GradCheckCase("div", _binary(dc.div, b_lo=0.5)),
        GradCheckCase("scale", _unary(lambda a: dc.scale(a, -1.7))),
        GradCheckCase("matmul", _matmul_case),
        GradCheckCase("leaky_relu", _leaky_case),
        GradCheckCase("softplus", _unary(dc.softplus, -3.0, 3.0)),
        GradCheckCase("log", _unary(dc.log, 0.5, 2.0)),
        GradCheckCase("exp", _unary(dc.exp)),
        GradCheckCase("power", _unary(lambda a: dc.power(a, 1.7), 0.5, 2.0)),
        GradCheckCase("sqrt", _unary(dc.sqrt, 0.5, 2.0)),
        GradCheckCase("clip", _clip_case),
        GradCheckCase("sum", _reduction_case(dc.reduce_sum, 1)),
        GradCheckCase("mean", _reduction_case(dc.mean, 0)),
        GradCheckCase("softmax", _unary(dc.softmax, -2.0, 2.0)),
        GradCheckCase("nll", _nll_case),
        GradCheckCase("concat", _concat_case),
        GradCheckCase("take", _take_case),
        GradCheckCase("mlp", _mlp_case),
        GradCheckCase("normalize_power", _normalize_case(False)),
        GradCheckCase("normalize_power_per_codeword", _normalize_case(True)),
        GradCheckCase("rayleigh_transmit", _rayleigh_case),
        GradCheckCase("MINE", _value_case(value_mine)),
        GradCheckCase("NWJ", _value_case(value_nwj)),
    ]
    cases += [GradCheckCase(f"SMILE:{tau:g}", _smile_case(tau)) for tau in (1.0, 5.0)]
    cases += [
        GradCheckCase(f"dDIME:{alpha:g}", _value_case(lambda dp, du, a=alpha: value_ddime(dp, du, a), 0.3, 2.0))
        for alpha in (0.5, 1.0, 2.0)
    ]
    cases += [
        GradCheckCase("fDIME:KL", _fdime_case("KL")),
        GradCheckCase("fDIME:GAN", _fdime_case("GAN")),
        GradCheckCase("fDIME:scaledKL", _fdime_case("scaledKL", 2.0)),
    ]
    cases += [
        GradCheckCase(f"gammaDIME:{gamma:g}", _value_case(lambda dp, du, g=gamma: value_gamma(dp, du, g), 0.3, 2.0))
        for gamma in (0.5, 1.0, 2.0)
    ]
    cases += [
        GradCheckCase("discriminator:MINE", _discriminator_case("MINE")),
        GradCheckCase("discriminator:gammaDIME", _discriminator_case("gammaDIME", gamma=2.0)),
        GradCheckCase("discriminator:fDIME:GAN", _discriminator_case("fDIME", generator="GAN")),
        GradCheckCase("ae_loss", _ae_loss_case),
    ]
    return cases


def run_suite(
    cases: Optional[Sequence[GradCheckCase]] = None,
    seed: int = 0,
    tolerance: float = 1e-4,
) -> List[Tuple[str, GradCheckReport]]:
    """
    Run every case with its own generator (seed + case index).

    Returns:
        (case name, report) pairs in case order
    """
    results = []
    for index, case in enumerate(cases if cases is not None else default_cases()):
        build, params = case.factory(np.random.default_rng(seed + index))
        report = gradient_check(build, params, tolerance=tolerance)
        status = "ok" if report.passed else "FAILED"
        logger.info(f"gradcheck {case.name:<32} max rel error {report.max_rel_error:.3e} {status}")
        results.append((case.name, report))
    return results
