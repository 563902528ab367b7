#!/usr/bin/env python3
"""
Closed-form reference curves: AWGN and Rayleigh capacity, uncoded BPSK
"""

import logging

import numpy as np
from scipy.special import erfc, exp1

from ..errors import ValidationError

# Set up logging
logger = logging.getLogger(__name__)


def awgn_capacity_bits(snr_linear):
    """log2(1 + snr) bits per complex channel use"""
    snr = np.asarray(snr_linear, dtype=np.float64)
    if np.any(snr < 0):
        raise ValidationError(f"snr must be non-negative, got {snr_linear}")
    out = np.log2(1.0 + snr)
    return float(out) if out.ndim == 0 else out


def rayleigh_ergodic_capacity_bits(snr_linear):
    """
    E[log2(1 + |h|^2 snr)] for unit-power Rayleigh fading with receiver CSI.

    Closed form e^(1/snr) E1(1/snr) / ln 2; zero at snr = 0.
    """
    snr = np.asarray(snr_linear, dtype=np.float64)
    if np.any(snr < 0):
        raise ValidationError(f"snr must be non-negative, got {snr_linear}")
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inv = 1.0 / snr
        out = np.where(snr > 0, np.exp(inv) * exp1(inv) / np.log(2.0), 0.0)
    # large 1/snr overflows exp(); the capacity there is ~ snr / ln 2
    if not np.all(np.isfinite(out)):
        logger.debug("Rayleigh capacity: using the low-snr asymptote where exp(1/snr) overflows")
    out = np.where(np.isfinite(out), out, snr / np.log(2.0))
    return float(out) if out.ndim == 0 else out


def bpsk_error_rate(ebn0_db):
    """Q(sqrt(2 Eb/N0)) = erfc(sqrt(Eb/N0)) / 2"""
    ebn0 = 10.0 ** (np.asarray(ebn0_db, dtype=np.float64) / 10.0)
    out = 0.5 * erfc(np.sqrt(ebn0))
    return float(out) if out.ndim == 0 else out
