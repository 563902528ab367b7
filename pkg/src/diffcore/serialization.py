#!/usr/bin/env python3
"""
Flat parameter files

Format: one JSON header line carrying caller metadata and the name and shape
of every parameter, followed by one float64 per line written with `repr` so
values round-trip exactly.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from ..errors import ShapeError
from .tensor import Parameter

# Set up logging
logger = logging.getLogger(__name__)

FORMAT_TAG = "flat-params-v1"


def save_parameters(path: Union[str, Path], params: Sequence[Parameter], metadata: Dict[str, Any] = None) -> Path:
    """
    Write parameters to a flat text file.

    Args:
        path: Destination file
        params: Parameters in a fixed order
        metadata: Extra header fields (e.g. M, n, channel settings)

    Returns:
        The written path
    """
    path = Path(path)
    header = {
        "format": FORMAT_TAG,
        "metadata": metadata or {},
        "parameters": [{"name": p.name, "shape": list(p.shape)} for p in params],
    }
    lines = [json.dumps(header, sort_keys=True)]
    for param in params:
        lines.extend(repr(float(v)) for v in param.data.reshape(-1))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    logger.info(f"Saved {len(params)} parameter tensors to {path}")
    return path


def read_parameter_file(path: Union[str, Path]) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """
    Read a flat parameter file.

    Returns:
        (metadata, arrays by parameter name in file order)

    Raises:
        FileNotFoundError: path does not exist
        ShapeError: the file is malformed or its value count disagrees with
            the header shapes
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Parameter file not found at {path}")
    with open(path, "r", encoding="utf-8") as f:
        header_line = f.readline()
        value_lines = [line for line in f if line.strip()]
    try:
        values = np.array([float(line) for line in value_lines], dtype=np.float64)
    except ValueError as e:
        raise ShapeError(f"{path}: unreadable value ({e})") from None
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as e:
        raise ShapeError(f"{path}: unreadable header ({e})") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT_TAG:
        raise ShapeError(f"{path}: not a {FORMAT_TAG} file")

    try:
        entries = [(entry["name"], tuple(int(s) for s in entry["shape"])) for entry in header["parameters"]]
        metadata = header.get("metadata", {})
    except (KeyError, TypeError, ValueError) as e:
        raise ShapeError(f"{path}: malformed header ({e!r})") from None

    arrays = {}
    offset = 0
    for name, shape in entries:
        count = int(np.prod(shape))
        if offset + count > values.size:
            raise ShapeError(f"{path}: header promises more values than the file holds")
        arrays[name] = values[offset:offset + count].reshape(shape)
        offset += count
    if offset != values.size:
        raise ShapeError(f"{path}: {values.size - offset} trailing values beyond the header shapes")
    return metadata, arrays


def load_parameters(path: Union[str, Path], params: Sequence[Parameter]) -> Dict[str, Any]:
    """
    Load values into existing parameters, matching by name and shape.

    Returns:
        The file's metadata
    """
    metadata, arrays = read_parameter_file(path)
    for param in params:
        if param.name not in arrays:
            raise ShapeError(f"{path}: missing parameter {param.name}")
        stored = arrays[param.name]
        if stored.shape != param.shape:
            raise ShapeError(f"{path}: {param.name} has shape {stored.shape}, expected {param.shape}")
        param.data[...] = stored
        param.reset_state()
    logger.info(f"Loaded {len(params)} parameter tensors from {path}")
    return metadata
