# Channel module for the capacity toolkit
# AWGN / Rayleigh models, power normalization, SNR bookkeeping, capacity oracles

from .capacity import awgn_capacity_bits, bpsk_error_rate, rayleigh_ergodic_capacity_bits
from .channel_model import (
    CHANNEL_KINDS,
    ChannelModel,
    ebn0_to_noise_variance,
    normalize_power,
    snr_from_noise_variance,
    symbol_power,
    transmit,
)
