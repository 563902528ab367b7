#!/usr/bin/env python3
"""
Tests for the differentiation core

Covers backward over shared subgraphs and broadcasts, the graph and shape
errors, the log floor and non-finite detection, the optimizers, gradient
checking with an injected fault, and flat parameter files.

Usage:
    pytest test_diffcore.py
    python test_diffcore.py
"""

import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from testkit import run_tests

from src import diffcore as dc
from src.diffcore import MLP, OptimizerConfig, Parameter, Tensor, backward, gradient_check, no_grad, optimizer_step
from src.errors import GraphError, NonFiniteError, ShapeError, ValidationError


def test_backward_square():
    x = Parameter(np.array([1.0, -2.0, 3.0]), name="x")
    backward(dc.reduce_sum(dc.mul(x, x)))
    assert np.allclose(x.grad, 2 * x.data)


def test_shared_leaf_accumulates():
    x = Parameter(np.array([[2.0]]), name="x")
    y = dc.add(dc.mul(x, 3.0), dc.mul(x, x))
    backward(dc.reduce_sum(y))
    assert x.grad[0, 0] == pytest.approx(3.0 + 4.0)
    backward(dc.reduce_sum(dc.mul(x, 3.0)))
    assert x.grad[0, 0] == pytest.approx(10.0)
    dc.zero_grads([x])
    assert x.grad[0, 0] == 0.0


def test_broadcast_gradient_sums_to_operand_shape():
    a = Parameter(np.ones((4, 3)), name="a")
    b = Parameter(np.ones((1, 3)), name="b")
    backward(dc.reduce_sum(dc.add(a, b)))
    assert b.grad.shape == (1, 3)
    assert np.allclose(b.grad, 4.0)


def test_backward_requires_scalar():
    x = Parameter(np.ones(3), name="x")
    with pytest.raises(ShapeError):
        backward(dc.mul(x, 2.0))


def test_backward_without_graph():
    with pytest.raises(GraphError):
        backward(Tensor(np.array(1.0)))


def test_no_grad_records_nothing():
    x = Parameter(np.ones(2), name="x")
    with no_grad():
        y = dc.reduce_sum(dc.mul(x, x))
    assert not y.requires_grad
    assert dc.is_grad_enabled()
    with pytest.raises(GraphError):
        backward(y)


def test_log_is_floored():
    out = dc.log(np.array([0.0, 1.0]))
    assert out.data[0] == pytest.approx(np.log(dc.LOG_FLOOR))
    assert out.data[1] == 0.0


def test_non_finite_names_op():
    with pytest.raises(NonFiniteError) as info:
        dc.exp(np.array([1000.0]))
    assert info.value.op == "exp"


def test_matmul_shape_mismatch():
    with pytest.raises(ShapeError):
        dc.matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_softmax_rows_are_distributions():
    rng = np.random.default_rng(0)
    p = dc.softmax(rng.normal(size=(5, 7)) * 30).data
    assert np.allclose(p.sum(axis=1), 1.0)
    assert np.all(p >= 0)


def test_softplus_matches_log1p_exp():
    v = np.array([-50.0, -1.0, 0.0, 2.0, 50.0])
    assert np.allclose(dc.softplus(v).data, np.logaddexp(0.0, v))


def test_take_repeats_accumulate():
    a = Parameter(np.arange(3.0), name="a")
    backward(dc.reduce_sum(dc.take(a, [0, 0, 2], axis=0)))
    assert np.allclose(a.grad, [2.0, 0.0, 1.0])


def test_sgd_step():
    p = Parameter(np.array([1.0]), name="p")
    p.grad = np.array([0.5])
    optimizer_step([p], OptimizerConfig(kind="SGD", learning_rate=0.1))
    assert p.data[0] == pytest.approx(0.95)


def test_adam_first_step_is_learning_rate():
    p = Parameter(np.array([1.0, -1.0]), name="p")
    p.grad = np.array([3.0, -0.01])
    optimizer_step([p], OptimizerConfig(learning_rate=0.01))
    assert np.allclose(p.data, [0.99, -0.99], atol=1e-6)
    assert p.step_count == 1


def test_adam_minimizes_quadratic():
    p = Parameter(np.array([3.0, -2.0]), name="p")
    config = OptimizerConfig(learning_rate=0.05)
    for _ in range(2000):
        dc.zero_grads([p])
        backward(dc.reduce_sum(dc.mul(dc.sub(p, 1.0), dc.sub(p, 1.0))))
        optimizer_step([p], config)
    assert np.allclose(p.data, 1.0, atol=1e-2)


def test_optimizer_config_validation():
    with pytest.raises(ValidationError) as info:
        OptimizerConfig(kind="RMSProp")
    assert info.value.key == "optimizer"
    with pytest.raises(ValidationError):
        OptimizerConfig(learning_rate=0.0)


def test_gradient_check_mlp_passes():
    rng = np.random.default_rng(1)
    net = MLP([3, 4, 2], rng)
    x = rng.normal(size=(5, 3))
    report = gradient_check(lambda: dc.reduce_sum(dc.softplus(net(x))), net.parameters())
    assert report.passed
    assert report.entries_checked == net.num_parameters()


def test_gradient_check_catches_wrong_gradient():
    def bad_square(a):
        a = dc.as_tensor(a)
        return Tensor.from_op("bad_square", a.data ** 2, (a,), lambda g: (g * 3.0 * a.data,))

    x = Parameter(np.array([0.7, -1.3]), name="x")
    report = gradient_check(lambda: dc.reduce_sum(bad_square(x)), [x])
    assert not report.passed
    assert report.worst_parameter == "x"
    assert report.max_rel_error == pytest.approx(1.0 / 3.0, rel=1e-6)


def test_gradient_check_needs_parameters():
    with pytest.raises(GraphError):
        gradient_check(lambda: Tensor(1.0), [])


def test_parameter_file_restores_exact_values():
    rng = np.random.default_rng(2)
    net = MLP([2, 3, 1], rng, name="net")
    copy = MLP([2, 3, 1], np.random.default_rng(99), name="net")
    with tempfile.TemporaryDirectory() as tmp:
        path = dc.save_parameters(Path(tmp) / "net.params", net.parameters(), {"tag": "demo"})
        metadata = dc.load_parameters(path, copy.parameters())
        text = path.read_bytes()
    assert metadata == {"tag": "demo"}
    assert b"\r\n" not in text
    for a, b in zip(net.parameters(), copy.parameters()):
        assert np.array_equal(a.data, b.data)


def test_parameter_file_shape_mismatch():
    with tempfile.TemporaryDirectory() as tmp:
        path = dc.save_parameters(Path(tmp) / "a.params", MLP([2, 3, 1], np.random.default_rng(0), name="net").parameters())
        with pytest.raises(ShapeError):
            dc.load_parameters(path, MLP([2, 4, 1], np.random.default_rng(0), name="net").parameters())


def test_parameter_file_missing():
    with pytest.raises(FileNotFoundError):
        dc.read_parameter_file("does/not/exist.params")


def test_damaged_parameter_files_raise_shape_errors():
    with tempfile.TemporaryDirectory() as tmp:
        path = dc.save_parameters(Path(tmp) / "a.params", MLP([2, 3, 1], np.random.default_rng(0), name="net").parameters())
        lines = path.read_text(encoding="utf-8").splitlines()

        garbled = Path(tmp) / "garbled.params"
        garbled.write_text("\n".join(lines[:2] + ["not-a-number"] + lines[3:]) + "\n", encoding="utf-8")
        with pytest.raises(ShapeError):
            dc.read_parameter_file(garbled)

        headless = Path(tmp) / "headless.params"
        headless.write_text("\n".join(['{"format": "flat-params-v1"}'] + lines[1:]) + "\n", encoding="utf-8")
        with pytest.raises(ShapeError):
            dc.read_parameter_file(headless)

        unnamed = Path(tmp) / "unnamed.params"
        header = '{"format": "flat-params-v1", "parameters": [{"shape": [2, 3]}]}'
        unnamed.write_text("\n".join([header] + lines[1:]) + "\n", encoding="utf-8")
        with pytest.raises(ShapeError):
            dc.read_parameter_file(unnamed)


if __name__ == "__main__":
    sys.exit(run_tests(globals()))
