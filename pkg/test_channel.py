#!/usr/bin/env python3
"""
Tests for the channel models, power normalization and capacity references

Usage:
    pytest test_channel.py
    python test_channel.py
"""

import sys

import numpy as np
import pytest

from testkit import run_tests

from src import diffcore as dc
from src.channel import (
    ChannelModel,
    awgn_capacity_bits,
    bpsk_error_rate,
    ebn0_to_noise_variance,
    normalize_power,
    rayleigh_ergodic_capacity_bits,
    snr_from_noise_variance,
    symbol_power,
    transmit,
)
from src.errors import ShapeError, ValidationError


def test_noise_variance_convention():
    assert ebn0_to_noise_variance(7.0, 2.0) == pytest.approx(1.0 / (2.0 * 10 ** 0.7))
    assert ebn0_to_noise_variance(7.0, 2.0) == pytest.approx(0.09976, abs=1e-5)
    assert ebn0_to_noise_variance(0.0, 1.0) == pytest.approx(1.0)
    assert ebn0_to_noise_variance(7.0, 1.0 / 3.0) == pytest.approx(0.5986, abs=1e-4)


def test_noise_variance_decreases_with_ebn0():
    values = [ebn0_to_noise_variance(db, 1.5) for db in np.arange(-4, 21, 1.0)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_noise_variance_needs_positive_rate():
    with pytest.raises(ValidationError):
        ebn0_to_noise_variance(7.0, 0.0)


def test_normalize_scales_by_one_scalar():
    x = np.full((3, 4), np.sqrt(2.0))  # n = 2, average symbol power 4
    assert np.allclose(symbol_power(x), 4.0)
    assert np.allclose(normalize_power(x).data, x / 2.0)


def test_normalize_keeps_unit_power_batch():
    x = np.array([[1.0, 0.0], [0.0, -1.0]])
    assert np.allclose(normalize_power(x).data, x)


def test_normalize_random_batch_has_unit_power():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(256, 6)) * 5.0
    assert abs(np.mean(symbol_power(normalize_power(x))) - 1.0) < 1e-9
    assert np.allclose(symbol_power(normalize_power(x, per_codeword=True)), 1.0, atol=1e-9)


def test_normalize_rejects_zero_power():
    with pytest.raises(ValidationError):
        normalize_power(np.zeros((4, 2)))


def test_codewords_need_even_width():
    with pytest.raises(ShapeError):
        symbol_power(np.ones((2, 3)))


def test_transmit_is_differentiable():
    x = dc.Parameter(np.ones((4, 2)), name="x")
    y = transmit(normalize_power(x), ChannelModel("AWGN", 0.1), np.random.default_rng(0))
    dc.backward(dc.reduce_sum(y))
    assert x.grad is not None and np.all(np.isfinite(x.grad))


def test_noiseless_limit():
    x = np.random.default_rng(1).normal(size=(10, 4))
    y = transmit(x, ChannelModel("AWGN", 1e-30), np.random.default_rng(2))
    assert np.allclose(y.data, x, atol=1e-12)


def test_awgn_noise_statistics():
    sigma2 = 0.3
    y = transmit(np.zeros((50000, 2)), ChannelModel("AWGN", sigma2), np.random.default_rng(4))
    power = np.mean(np.sum(y.data ** 2, axis=1))
    assert power == pytest.approx(sigma2, rel=0.02)
    assert abs(np.mean(y.data)) < 0.01


def test_rayleigh_received_power():
    sigma2 = 0.2
    x = np.tile([1.0, 0.0], (100000, 1))
    y = transmit(x, ChannelModel("Rayleigh", sigma2), np.random.default_rng(5))
    assert np.mean(np.sum(y.data ** 2, axis=1)) == pytest.approx(1.0 + sigma2, rel=0.02)


def test_channel_model_validation():
    with pytest.raises(ValidationError):
        ChannelModel("Rician", 1.0)
    with pytest.raises(ValidationError):
        ChannelModel("AWGN", 0.0)
    assert ChannelModel.from_ebn0("AWGN", 0.0, 1.0).snr_linear == pytest.approx(1.0)
    assert snr_from_noise_variance(0.25) == pytest.approx(4.0)


def test_awgn_capacity_values():
    assert awgn_capacity_bits(0.0) == 0.0
    assert awgn_capacity_bits(1.0) == pytest.approx(1.0)
    assert awgn_capacity_bits(3.0) == pytest.approx(2.0)


def test_awgn_capacity_increasing_and_concave():
    c = awgn_capacity_bits(np.linspace(0.0, 50.0, 501))
    first = np.diff(c)
    assert np.all(first > 0)
    assert np.all(np.diff(first) < 0)


def test_rayleigh_capacity_below_awgn():
    snr = np.array([0.1, 1.0, 10.0, 100.0])
    rayleigh = rayleigh_ergodic_capacity_bits(snr)
    assert np.all(rayleigh < awgn_capacity_bits(snr))
    assert np.all(rayleigh > 0)
    assert rayleigh_ergodic_capacity_bits(0.0) == 0.0


def test_rayleigh_capacity_matches_monte_carlo():
    rng = np.random.default_rng(6)
    gain = rng.exponential(size=400000)
    snr = 5.0
    assert rayleigh_ergodic_capacity_bits(snr) == pytest.approx(np.mean(np.log2(1.0 + gain * snr)), rel=5e-3)


def test_bpsk_error_rate():
    assert bpsk_error_rate(7.0) == pytest.approx(7.727e-4, rel=1e-3)
    assert bpsk_error_rate(0.0) == pytest.approx(0.0786, abs=1e-4)


if __name__ == "__main__":
    sys.exit(run_tests(globals()))
