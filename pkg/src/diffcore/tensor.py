#!/usr/bin/env python3
"""
Reverse-mode differentiable tensors

This module provides the dense float64 Tensor used by every network and value
function in the toolkit, the Parameter leaf that carries optimizer state, and
the op set needed to build discriminators, encoders and decoders. Each op
records a closure computing the vector-Jacobian product for its parents;
`backward` walks the recorded graph in reverse topological order.
"""

import logging
import threading
from contextlib import contextmanager
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from ..errors import GraphError, NonFiniteError, ShapeError

# Set up logging
logger = logging.getLogger(__name__)

LOG_FLOOR = 1e-38

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence[float]]
BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

_state = threading.local()


def is_grad_enabled() -> bool:
    """Whether ops executed on this thread record a graph"""
    return getattr(_state, "grad_enabled", True)


@contextmanager
def no_grad():
    """Run ops without recording a graph (evaluation and Monte-Carlo paths)"""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def _check_finite(data: np.ndarray, op: str) -> None:
    if not np.all(np.isfinite(data)):
        bad = int(np.size(data) - np.count_nonzero(np.isfinite(data)))
        raise NonFiniteError(op, f"{bad} of {np.size(data)} entries")


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to an operand's shape"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """Dense float64 array that can take part in differentiation"""

    def __init__(self, data: ArrayLike, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = np.zeros_like(self.data) if requires_grad else None
        self.name = name
        self.op: Optional[str] = None
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None
        _check_finite(self.data, name or "tensor")

    @classmethod
    def from_op(cls, op: str, data: np.ndarray, parents: Sequence["Tensor"], backward: BackwardFn) -> "Tensor":
        """
        Wrap the output of an op and record how to differentiate it.

        Args:
            op: Op name, reported on non-finite output
            data: Forward values
            parents: Input tensors in the order `backward` returns their grads
            backward: Maps the output grad to one grad (or None) per parent

        Returns:
            Output tensor, attached to the graph when any parent requires grad
        """
        _check_finite(data, op)
        out = cls.__new__(cls)
        out.data = np.asarray(data, dtype=np.float64)
        out.grad = None
        out.name = None
        out.op = op
        out.requires_grad = is_grad_enabled() and any(p.requires_grad for p in parents)
        if out.requires_grad:
            out._parents = tuple(parents)
            out._backward = backward
        else:
            out._parents = ()
            out._backward = None
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        """Constant view of the same values, cut from the graph"""
        out = Tensor.__new__(Tensor)
        out.data = self.data
        out.grad = None
        out.name = self.name
        out.op = None
        out.requires_grad = False
        out._parents = ()
        out._backward = None
        return out

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.data)

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        label = self.name or self.op or "tensor"
        return f"Tensor({label}, shape={self.shape})"

    # Operator sugar; the named functions below are the op set
    def __add__(self, other: ArrayLike) -> "Tensor":
        return add(self, other)

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return add(other, self)

    def __sub__(self, other: ArrayLike) -> "Tensor":
        return sub(self, other)

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return sub(other, self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        return mul(self, other)

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return mul(other, self)

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        return div(self, other)

    def __neg__(self) -> "Tensor":
        return scale(self, -1.0)

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        return matmul(self, other)

    def __pow__(self, exponent: float) -> "Tensor":
        return power(self, exponent)


class Parameter(Tensor):
    """
    Trainable leaf tensor.

    The optimizer keeps its per-parameter state here: first and second moment
    buffers (same shape as the values) and the step counter.
    """

    def __init__(self, data: ArrayLike, name: Optional[str] = None):
        super().__init__(data, requires_grad=True, name=name)
        self.first_moment = np.zeros_like(self.data)
        self.second_moment = np.zeros_like(self.data)
        self.step_count = 0

    def reset_state(self) -> None:
        self.first_moment = np.zeros_like(self.data)
        self.second_moment = np.zeros_like(self.data)
        self.step_count = 0

    def __repr__(self) -> str:
        return f"Parameter({self.name}, shape={self.shape})"


def as_tensor(value: ArrayLike) -> Tensor:
    """Wrap arrays and scalars as constant tensors; tensors pass through"""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(output: Tensor) -> None:
    """
    Propagate d(output)/d(leaf) into every leaf that requires grad.

    Leaf gradients accumulate across calls until zeroed with `zero_grads`.

    Args:
        output: Scalar tensor produced by a recorded forward pass

    Raises:
        ShapeError: output is not a scalar
        GraphError: output carries no recorded graph
    """
    if output.size != 1:
        raise ShapeError(f"backward needs a scalar output, got shape {output.shape}")
    if not output.requires_grad:
        raise GraphError("backward called on a tensor with no recorded forward graph")

    grads = {id(output): np.ones_like(output.data)}
    for node in reversed(_topological_order(output)):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue
        if node.is_leaf:
            if node.grad is None:
                node.grad = np.zeros_like(node.data)
            node.grad += grad
            continue
        parent_grads = node._backward(grad)
        for parent, parent_grad in zip(node._parents, parent_grads):
            if parent_grad is None or not parent.requires_grad:
                continue
            if id(parent) in grads:
                grads[id(parent)] = grads[id(parent)] + parent_grad
            else:
                grads[id(parent)] = parent_grad


def zero_grads(params: Iterable[Tensor]) -> None:
    """Reset accumulated gradients"""
    for param in params:
        param.zero_grad()


# ---------------------------------------------------------------------------
# Op set
# ---------------------------------------------------------------------------

def _broadcast_shapes(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from None


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    """Elementwise sum with broadcasting (also serves as bias add)"""
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes("add", a, b)

    def grad_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor.from_op("add", a.data + b.data, (a, b), grad_fn)


def bias_add(x: ArrayLike, bias: ArrayLike) -> Tensor:
    """Add a per-feature bias row to a (batch, features) tensor"""
    x, bias = as_tensor(x), as_tensor(bias)
    if x.data.ndim != 2 or bias.shape[-1] != x.shape[1]:
        raise ShapeError(f"bias_add: bias {bias.shape} does not match features of {x.shape}")

    def grad_fn(g):
        return g, _unbroadcast(g, bias.shape)

    return Tensor.from_op("bias_add", x.data + bias.data, (x, bias), grad_fn)


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes("sub", a, b)

    def grad_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor.from_op("sub", a.data - b.data, (a, b), grad_fn)


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes("mul", a, b)

    def grad_fn(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor.from_op("mul", a.data * b.data, (a, b), grad_fn)


def div(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes("div", a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a.data / b.data

    def grad_fn(g):
        return (_unbroadcast(g / b.data, a.shape),
                _unbroadcast(-g * a.data / (b.data * b.data), b.shape))

    return Tensor.from_op("div", out, (a, b), grad_fn)


def scale(a: ArrayLike, factor: float) -> Tensor:
    """Multiply by a fixed scalar"""
    a = as_tensor(a)
    factor = float(factor)

    def grad_fn(g):
        return (g * factor,)

    return Tensor.from_op("scale", a.data * factor, (a,), grad_fn)


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """2-D matrix product"""
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}")

    def grad_fn(g):
        return g @ b.data.T, a.data.T @ g

    return Tensor.from_op("matmul", a.data @ b.data, (a, b), grad_fn)


def leaky_relu(a: ArrayLike, slope: float = 0.2) -> Tensor:
    a = as_tensor(a)
    slopes = np.where(a.data > 0, 1.0, slope)

    def grad_fn(g):
        return (g * slopes,)

    return Tensor.from_op("leaky_relu", a.data * slopes, (a,), grad_fn)


def softplus(a: ArrayLike) -> Tensor:
    """log(1 + e^a), computed without overflow"""
    a = as_tensor(a)

    def grad_fn(g):
        return (g * expit(a.data),)

    return Tensor.from_op("softplus", np.logaddexp(0.0, a.data), (a,), grad_fn)


def log(a: ArrayLike, floor: float = LOG_FLOOR) -> Tensor:
    """Natural log of max(a, floor); no gradient flows through the floor"""
    a = as_tensor(a)
    clamped = np.maximum(a.data, floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(clamped)

    def grad_fn(g):
        return (np.where(a.data > floor, g / clamped, 0.0),)

    return Tensor.from_op("log", out, (a,), grad_fn)


def exp(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    with np.errstate(over="ignore"):
        out = np.exp(a.data)

    def grad_fn(g):
        return (g * out,)

    return Tensor.from_op("exp", out, (a,), grad_fn)


def power(a: ArrayLike, exponent: float) -> Tensor:
    """a ** exponent for a fixed real exponent"""
    a = as_tensor(a)
    exponent = float(exponent)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.power(a.data, exponent)

    def grad_fn(g):
        with np.errstate(divide="ignore", invalid="ignore"):
            return (g * exponent * np.power(a.data, exponent - 1.0),)

    return Tensor.from_op("power", out, (a,), grad_fn)


def clip(a: ArrayLike, lo: float = -np.inf, hi: float = np.inf) -> Tensor:
    """Clamp into [lo, hi]; the gradient is zero where clamping is active"""
    a = as_tensor(a)
    if lo > hi:
        raise ShapeError(f"clip: lower bound {lo} exceeds upper bound {hi}")
    inside = (a.data >= lo) & (a.data <= hi)

    def grad_fn(g):
        return (g * inside,)

    return Tensor.from_op("clip", np.clip(a.data, lo, hi), (a,), grad_fn)


def sum(a: ArrayLike, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    a = as_tensor(a)

    def grad_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return Tensor.from_op("sum", np.sum(a.data, axis=axis, keepdims=keepdims), (a,), grad_fn)


def mean(a: ArrayLike, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    """Mean over all entries, or over one axis (axis 0 is the batch)"""
    a = as_tensor(a)
    count = a.size if axis is None else a.shape[axis]
    if count == 0:
        raise ShapeError("mean of an empty tensor")

    def grad_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g / count, a.shape).copy(),)

    return Tensor.from_op("mean", np.mean(a.data, axis=axis, keepdims=keepdims), (a,), grad_fn)


def softmax(a: ArrayLike) -> Tensor:
    """Softmax over the last axis"""
    a = as_tensor(a)
    shifted = a.data - np.max(a.data, axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / np.sum(e, axis=-1, keepdims=True)

    def grad_fn(g):
        return (out * (g - np.sum(g * out, axis=-1, keepdims=True)),)

    return Tensor.from_op("softmax", out, (a,), grad_fn)


def nll(probs: ArrayLike, targets: Sequence[int], floor: float = LOG_FLOOR) -> Tensor:
    """
    Negative log-likelihood of integer targets under row probabilities.

    Args:
        probs: (batch, classes) probability rows
        targets: One class index per row

    Returns:
        Scalar mean over the batch of -log(probs[i, targets[i]])
    """
    probs = as_tensor(probs)
    targets = np.asarray(targets, dtype=np.int64)
    if probs.data.ndim != 2 or targets.shape != (probs.shape[0],):
        raise ShapeError(f"nll: {targets.shape} targets for probabilities of shape {probs.shape}")
    rows = np.arange(probs.shape[0])
    picked = np.maximum(probs.data[rows, targets], floor)
    batch = probs.shape[0]

    def grad_fn(g):
        grad = np.zeros_like(probs.data)
        live = probs.data[rows, targets] > floor
        grad[rows, targets] = np.where(live, -g / (batch * picked), 0.0)
        return (grad,)

    return Tensor.from_op("nll", np.array(-np.mean(np.log(picked))), (probs,), grad_fn)


def concat(tensors: Sequence[ArrayLike], axis: int = -1) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError as e:
        raise ShapeError(f"concat: {e}") from None
    bounds = np.cumsum([p.shape[axis] for p in parts])[:-1]

    def grad_fn(g):
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor.from_op("concat", out, parts, grad_fn)


def take(a: ArrayLike, indices: Sequence[int], axis: int = 0) -> Tensor:
    """Gather entries along one axis by integer index (repeats allowed)"""
    a = as_tensor(a)
    indices = np.asarray(indices, dtype=np.int64)
    try:
        out = np.take(a.data, indices, axis=axis)
    except IndexError as e:
        raise ShapeError(f"take: {e}") from None

    def grad_fn(g):
        grad = np.zeros_like(a.data)
        moved = np.moveaxis(grad, axis, 0)
        np.add.at(moved, indices, np.moveaxis(g, axis, 0))
        return (grad,)

    return Tensor.from_op("take", out, (a,), grad_fn)


def sqrt(a: ArrayLike) -> Tensor:
    return power(a, 0.5)
