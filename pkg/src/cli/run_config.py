#!/usr/bin/env python3
"""
Run configuration

Run configs are sectioned JSON documents (see config/*.json). Every key is
checked against a fixed schema, converted to its type and handed to the
owning module's constructor; any failure is reported as a ValidationError
naming the exact `section.key`.
"""

import json
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from ..autoencoder import AEConfig
from ..diffcore import OptimizerConfig
from ..errors import ValidationError
from ..estimators import ESTIMATOR_KINDS, EstimatorSpec, parse_estimator

# Set up logging
logger = logging.getLogger(__name__)

SEED_ENV = "CAPACITY_SEED"
MAX_SEED = 2 ** 64 - 1


def _as_int(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
        raise ValueError(f"expected an integer, got {value!r}")
    return int(value)


def _as_float(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    return float(value)


def _as_bool(value: Any) -> bool:
    if not isinstance(value, bool):
        raise ValueError(f"expected true or false, got {value!r}")
    return value


def _as_str(value: Any) -> str:
    if not isinstance(value, str):
        raise ValueError(f"expected a string, got {value!r}")
    return value


def _list_of(convert: Callable[[Any], Any]) -> Callable[[Any], list]:
    def parse(value: Any) -> list:
        if not isinstance(value, list) or not value:
            raise ValueError(f"expected a nonempty list, got {value!r}")
        return [convert(v) for v in value]

    return parse


def parse_grid(value: Any) -> List[float]:
    """
    Eb/N0 grid from an explicit list or {start, stop, step} (stop included).
    """
    if isinstance(value, list):
        return _list_of(_as_float)(value)
    if not isinstance(value, dict) or set(value) != {"start", "stop", "step"}:
        raise ValueError("expected a list or an object with start, stop and step")
    start, stop, step = (_as_float(value[k]) for k in ("start", "stop", "step"))
    if not step > 0 or stop < start:
        raise ValueError(f"empty grid from {start} to {stop} by {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


SCHEMA: Dict[str, Dict[str, Callable[[Any], Any]]] = {
    "system": {"M": _as_int, "n": _as_int, "per_codeword_power": _as_bool},
    "channel": {"kind": _as_str, "train_ebn0_db": _as_float},
    "loss": {"beta": _as_float, "epsilon": _as_float},
    "estimator": {
        "kind": _as_str,
        "gamma": _as_float,
        "alpha": _as_float,
        "tau": _as_float,
        "ema_rate": _as_float,
        "generator": _as_str,
        "hidden_units": _as_int,
    },
    "training": {
        "iterations": _as_int,
        "batch": _as_int,
        "learning_rate": _as_float,
        "optimizer": _as_str,
        "discriminator_steps": _as_int,
        "log_every": _as_int,
    },
    "eval": {
        "ebn0_grid": parse_grid,
        "min_errors": _as_int,
        "max_blocks": _as_int,
        "estimators": _list_of(_as_str),
        "mi_iterations": _as_int,
        "mi_batch": _as_int,
        "warm_start": _as_bool,
    },
    "bench": {
        "dims": _list_of(_as_int),
        "rhos": _list_of(_as_float),
        "estimators": _list_of(_as_str),
        "iterations": _as_int,
        "batch": _as_int,
    },
}

# Keys raised by the owning constructors, as they appear in a config file
_KEY_SECTIONS = {
    "optimizer": "training.optimizer",
    "learning_rate": "training.learning_rate",
    "betas": "training.optimizer",
    "epsilon": "training.optimizer",
}


@dataclass(frozen=True)
class EvalSettings:
    ebn0_grid: List[float] = field(default_factory=lambda: parse_grid({"start": -4, "stop": 20, "step": 2}))
    min_errors: int = 100
    max_blocks: int = 10 ** 6
    estimators: List[str] = field(default_factory=lambda: ["gammaDIME:1"])
    mi_iterations: int = 2000
    mi_batch: int = 512
    warm_start: bool = False


@dataclass(frozen=True)
class BenchSettings:
    dims: List[int] = field(default_factory=lambda: [1, 5, 10])
    rhos: List[float] = field(default_factory=lambda: [0.0, 0.5, 0.8])
    estimators: List[str] = field(default_factory=lambda: list(ESTIMATOR_KINDS))
    iterations: int = 10000
    batch: int = 512


@dataclass(frozen=True)
class RunConfig:
    """A validated run config; `seed` already reflects overrides"""

    ae: AEConfig
    estimator: EstimatorSpec
    eval: EvalSettings
    bench: BenchSettings
    seed: int
    source: Optional[Path] = None

    def mi_estimators(self) -> List[EstimatorSpec]:
        base = replace(self.estimator, iterations=self.eval.mi_iterations, batch_size=self.eval.mi_batch)
        return _parse_estimator_list(self.eval.estimators, base, "eval.estimators")

    def bench_estimators(self) -> List[EstimatorSpec]:
        base = replace(self.estimator, iterations=self.bench.iterations, batch_size=self.bench.batch)
        return _parse_estimator_list(self.bench.estimators, base, "bench.estimators")


def _parse_estimator_list(texts: Sequence[str], base: EstimatorSpec, key: str) -> List[EstimatorSpec]:
    try:
        return [parse_estimator(text, base) for text in texts]
    except ValidationError as e:
        raise ValidationError(e.detail, key=key) from None


def _owning_key(error: ValidationError, section: str) -> str:
    key = error.key or section
    if "." in key:
        return key
    return _KEY_SECTIONS.get(key, f"{section}.{key}")


def _read_sections(document: Any) -> Dict[str, Dict[str, Any]]:
    if not isinstance(document, dict):
        raise ValidationError("a run config must be a JSON object")
    sections: Dict[str, Dict[str, Any]] = {name: {} for name in SCHEMA}
    for name, body in document.items():
        if name == "seed":
            continue
        if name not in SCHEMA:
            raise ValidationError("unknown section", key=name)
        if not isinstance(body, dict):
            raise ValidationError("a section must be a JSON object", key=name)
        for key, value in body.items():
            if key not in SCHEMA[name]:
                raise ValidationError("unknown key", key=f"{name}.{key}")
            try:
                sections[name][key] = SCHEMA[name][key](value)
            except ValueError as e:
                raise ValidationError(str(e), key=f"{name}.{key}") from None
    return sections


def resolve_seed(file_seed: Any, flag_seed: Optional[int] = None) -> int:
    """--seed flag, then CAPACITY_SEED, then the file's seed, then 0"""
    if flag_seed is not None:
        source, raw = "--seed", flag_seed
    elif os.getenv(SEED_ENV):
        source, raw = SEED_ENV, os.getenv(SEED_ENV)
    else:
        source, raw = "seed", 0 if file_seed is None else file_seed
    try:
        seed = int(raw) if isinstance(raw, str) else _as_int(raw)
    except ValueError:
        raise ValidationError(f"not an integer: {raw!r}", key=source) from None
    if not 0 <= seed <= MAX_SEED:
        raise ValidationError(f"must be an unsigned 64-bit integer, got {seed}", key=source)
    return seed


def build_run_config(document: Any, seed: Optional[int] = None, source: Optional[Path] = None) -> RunConfig:
    """Validate a parsed JSON document and build the module configs"""
    sections = _read_sections(document)
    system, channel, loss = sections["system"], sections["channel"], sections["loss"]
    est, training = sections["estimator"], sections["training"]

    section = "training"
    try:
        optimizer = OptimizerConfig(
            kind=training.get("optimizer", "Adam"),
            learning_rate=training.get("learning_rate", 0.01),
        )
        section = "estimator"
        spec = EstimatorSpec(
            kind=est.get("kind", "gammaDIME"),
            alpha=est.get("alpha", 1.0),
            gamma=est.get("gamma", 1.0),
            tau=est.get("tau", 5.0),
            ema_rate=est.get("ema_rate", 0.99),
            generator=est.get("generator", "KL"),
            hidden_units=est.get("hidden_units", 200),
            iterations=training.get("iterations", 10000),
            batch_size=training.get("batch", 512),
            log_every=training.get("log_every", 10),
            optimizer=optimizer,
        )
        section = "system"
        ae = AEConfig(
            M=system.get("M", 64),
            n=system.get("n", 3),
            beta=loss.get("beta", 0.2),
            epsilon=loss.get("epsilon", 0.2),
            train_ebn0_db=channel.get("train_ebn0_db", 7.0),
            channel_kind=channel.get("kind", "AWGN"),
            iterations=spec.iterations,
            batch_size=spec.batch_size,
            estimator=spec,
            optimizer=optimizer,
            discriminator_steps=training.get("discriminator_steps", 1),
            per_codeword_power=system.get("per_codeword_power", False),
            log_every=spec.log_every,
        )
        section = "eval"
        evaluation = EvalSettings(**sections["eval"])
        if evaluation.min_errors < 1 or evaluation.max_blocks < 1:
            raise ValidationError("min_errors and max_blocks must be positive", key="eval.min_errors")
        section = "bench"
        bench = BenchSettings(**sections["bench"])
        if any(d < 1 for d in bench.dims):
            raise ValidationError("dimensions must be at least 1", key="bench.dims")
        if any(not abs(r) < 1 for r in bench.rhos):
            raise ValidationError("correlations must lie in (-1, 1)", key="bench.rhos")
    except ValidationError as e:
        raise ValidationError(e.detail, key=_owning_key(e, section)) from None

    config = RunConfig(ae, spec, evaluation, bench, resolve_seed(document.get("seed"), seed), source)
    config.mi_estimators()
    config.bench_estimators()
    return config


def load_run_config(path: Union[str, Path], seed: Optional[int] = None) -> RunConfig:
    """
    Load and validate a run config file.

    Args:
        path: JSON config file
        seed: Seed from the command line; wins over the environment and the file

    Returns:
        Validated RunConfig

    Raises:
        FileNotFoundError: path does not exist
        ValidationError: malformed JSON, unknown keys or invalid values
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path}: not valid JSON ({e})") from None
    config = build_run_config(document, seed, path)
    logger.info(
        f"Loaded {path.name}: M={config.ae.M}, n={config.ae.n}, R={config.ae.rate:.4f}, "
        f"{config.ae.channel_kind} at {config.ae.train_ebn0_db} dB, estimator {config.estimator.label}, seed {config.seed}"
    )
    return config
