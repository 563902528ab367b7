#!/usr/bin/env python3
"""
Encoder and decoder networks and the LinkSystem that joins them

The encoder maps a one-hot message through M -> M -> 2n dense layers and
power normalization; the decoder maps 2n received reals through 2n -> M -> M
layers to softmax posteriors. A LinkSystem carries both plus the channel and
saves to a flat parameter file.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Protocol, Sequence, Union

import numpy as np

from ..channel import ChannelModel, normalize_power, transmit
from ..diffcore import MLP, Module, Parameter, Tensor, load_parameters, read_parameter_file, save_parameters, softmax
from ..errors import ShapeError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)


def one_hot(messages: Sequence[int], M: int) -> np.ndarray:
    messages = np.asarray(messages, dtype=np.int64)
    if np.any(messages < 0) or np.any(messages >= M):
        raise ValidationError(f"messages outside 0..{M - 1}")
    out = np.zeros((messages.size, M))
    out[np.arange(messages.size), messages] = 1.0
    return out


class EncoderNet(Module):
    """Symbol modulator: message index -> 2n reals with unit average symbol power"""

    def __init__(self, M: int, n: int, rng: np.random.Generator, per_codeword_power: bool = False):
        self.M = M
        self.n = n
        self.per_codeword_power = per_codeword_power
        self.mlp = MLP([M, M, 2 * n], rng, slope=0.2, name="encoder")

    def __call__(self, messages: Sequence[int]) -> Tensor:
        return normalize_power(self.mlp(one_hot(messages, self.M)), per_codeword=self.per_codeword_power)

    def parameters(self) -> List[Parameter]:
        return self.mlp.parameters()


class DecoderNet(Module):
    """Demodulator: 2n received reals -> posterior over M messages"""

    def __init__(self, M: int, n: int, rng: np.random.Generator):
        self.M = M
        self.n = n
        self.mlp = MLP([2 * n, M, M], rng, output_activation=softmax, slope=0.2, name="decoder")

    def __call__(self, y) -> Tensor:
        return self.mlp(y)

    def parameters(self) -> List[Parameter]:
        return self.mlp.parameters()


class CodedLink(Protocol):
    """What evaluation needs from a trained (or hand-coded) link"""

    M: int
    n: int
    channel: ChannelModel

    @property
    def rate(self) -> float:
        ...

    def encode(self, messages: Sequence[int]) -> Tensor:
        ...

    def posteriors(self, y) -> Tensor:
        ...

    def with_channel(self, channel: ChannelModel) -> "CodedLink":
        ...


@dataclass
class LinkSystem:
    """Encoder, decoder and channel of a trained autoencoder link"""

    encoder: EncoderNet
    decoder: DecoderNet
    channel: ChannelModel

    @property
    def M(self) -> int:
        return self.encoder.M

    @property
    def n(self) -> int:
        return self.encoder.n

    @property
    def rate(self) -> float:
        """log2(M) / n bits per channel use"""
        return float(np.log2(self.M) / self.n)

    def encode(self, messages: Sequence[int]) -> Tensor:
        return self.encoder(messages)

    def posteriors(self, y) -> Tensor:
        return self.decoder(y)

    def transmit(self, x, rng: np.random.Generator) -> Tensor:
        return transmit(x, self.channel, rng)

    def with_channel(self, channel: ChannelModel) -> "LinkSystem":
        return replace(self, channel=channel)

    def parameters(self) -> List[Parameter]:
        return self.encoder.parameters() + self.decoder.parameters()

    def save(self, path: Union[str, Path]) -> Path:
        metadata = {
            "M": self.M,
            "n": self.n,
            "channel_kind": self.channel.kind,
            "noise_variance": self.channel.noise_variance,
            "per_codeword_power": self.encoder.per_codeword_power,
            "encoder_layers": self.encoder.mlp.sizes,
            "decoder_layers": self.decoder.mlp.sizes,
        }
        return save_parameters(path, self.parameters(), metadata)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LinkSystem":
        """
        Rebuild a system from a parameter file.

        Raises:
            FileNotFoundError: path does not exist
            ShapeError: the file does not describe an encoder/decoder pair
        """
        metadata, _ = read_parameter_file(path)
        try:
            M, n = int(metadata["M"]), int(metadata["n"])
            channel = ChannelModel(metadata["channel_kind"], float(metadata["noise_variance"]))
            per_codeword = bool(metadata.get("per_codeword_power", False))
        except (KeyError, TypeError, ValueError) as e:
            raise ShapeError(f"{path}: unusable link metadata ({e!r})") from None
        rng = np.random.default_rng(0)
        system = cls(EncoderNet(M, n, rng, per_codeword), DecoderNet(M, n, rng), channel)
        load_parameters(path, system.parameters())
        logger.info(f"Loaded AE({int(np.log2(M))},{n}) link from {path}")
        return system

    def check_shape(self, M: int, n: int) -> None:
        if (self.M, self.n) != (M, n):
            raise ShapeError(f"model is M={self.M}, n={self.n} but the config asks for M={M}, n={n}")
