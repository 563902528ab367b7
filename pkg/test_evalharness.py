#!/usr/bin/env python3
"""
Tests for BLER simulation, MI sweeps, the Gaussian benchmark, value
landscapes and the result files

Usage:
    pytest test_evalharness.py
    RUN_SLOW=1 pytest test_evalharness.py
    python test_evalharness.py
"""

import csv
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from testkit import require_slow, run_tests

from src.autoencoder import AEConfig, decode_hard_batch, train_autoencoder
from src.channel import ChannelModel, awgn_capacity_bits, bpsk_error_rate, symbol_power
from src.diffcore import OptimizerConfig, no_grad
from src.errors import ValidationError
from src.estimators import EstimatorSpec, parse_estimator
from src.evalharness import (
    BenchRow,
    BlerPoint,
    CorrelatedGaussianSource,
    LandscapeCurve,
    MiSweepPoint,
    capacity_reference_bits,
    codebook,
    compare_estimators,
    default_d_grid,
    export_results,
    gaussian_mi_oracle,
    is_monotone_non_increasing,
    mean_abs_error,
    reference_bpsk_system,
    run_gaussian_benchmark,
    simulate_bler,
    sweep_mi,
    value_landscape,
    write_bench_csv,
    write_mi_csv,
)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def quick_spec(kind: str = "gammaDIME", **kwargs) -> EstimatorSpec:
    return EstimatorSpec(
        kind=kind,
        iterations=60,
        batch_size=64,
        hidden_units=8,
        optimizer=OptimizerConfig(learning_rate=0.005),
        smoothing_window=20,
        **kwargs,
    )


# ---------------------------------------------------------------------------
# BLER
# ---------------------------------------------------------------------------

def test_reference_link_matches_bpsk_error_rate():
    link = reference_bpsk_system()
    points = simulate_bler(link, [4.0, 7.0, 10.0], min_errors=400, max_blocks=2 * 10 ** 6, seed=11, disable_progress=True)
    for point in points:
        oracle = bpsk_error_rate(point.ebn0_db)
        sigma = np.sqrt(oracle * (1 - oracle) / point.blocks)
        assert abs(point.bler - oracle) <= 3 * sigma, point
    assert [p.seed for p in points] == [11, 12, 13]
    assert is_monotone_non_increasing(points)


def test_reference_posteriors_are_distributions():
    link = reference_bpsk_system(0.0)
    p = link.posteriors(link.encode([0, 1, 1])).data
    assert np.allclose(p.sum(axis=1), 1.0)
    assert p[0, 0] > 0.5 and p[1, 1] > 0.5


def test_bler_stops_at_block_limit():
    points = simulate_bler(reference_bpsk_system(), [20.0], min_errors=100, max_blocks=5000, disable_progress=True)
    assert points[0].blocks == 5000
    assert points[0].errors == 0


def test_bler_rejects_empty_grid():
    with pytest.raises(ValidationError):
        simulate_bler(reference_bpsk_system(), [], disable_progress=True)


def test_monotonicity_check():
    falling = [BlerPoint(0.0, 10000, 900, 0), BlerPoint(2.0, 10000, 500, 1), BlerPoint(4.0, 10000, 505, 2)]
    assert is_monotone_non_increasing(falling)
    rising = falling + [BlerPoint(6.0, 10000, 900, 3)]
    assert not is_monotone_non_increasing(rising)


def test_bler_point_validation():
    with pytest.raises(ValidationError):
        BlerPoint(0.0, 0, 0, 0)
    assert BlerPoint(0.0, 4, 1, 0).bler == 0.25


def test_short_chunks_use_the_full_codebook():
    config = AEConfig(M=4, n=1, iterations=20, batch_size=32, estimator=EstimatorSpec(hidden_units=8))
    system, _ = train_autoencoder(config, np.random.default_rng(12), disable_progress=True)
    constellation = codebook(system)
    assert constellation.shape == (4, 2)
    assert np.mean(symbol_power(constellation)) == pytest.approx(1.0, abs=1e-12)

    with no_grad():
        wrong = decode_hard_batch(system.posteriors(constellation)) != np.arange(4)
    for seed in range(20):
        (point,) = simulate_bler(system, [120.0], min_errors=1, max_blocks=1, seed=seed, disable_progress=True)
        (message,) = np.random.default_rng(seed).integers(0, 4, size=1)
        assert point.errors == int(wrong[message]), seed


def test_learned_link_bler_falls_with_snr():
    config = AEConfig(
        M=4,
        n=2,
        iterations=600,
        batch_size=64,
        train_ebn0_db=5.0,
        estimator=EstimatorSpec(hidden_units=16, smoothing_window=50),
        log_every=100,
    )
    system, _ = train_autoencoder(config, np.random.default_rng(13), disable_progress=True)
    points = simulate_bler(system, [0.0, 2.0, 4.0, 6.0, 8.0], min_errors=200, max_blocks=60000, seed=13,
                           disable_progress=True)
    assert is_monotone_non_increasing(points, sigmas=2.0)
    assert points[-1].bler < points[0].bler


# ---------------------------------------------------------------------------
# MI sweep
# ---------------------------------------------------------------------------

def test_capacity_reference():
    channel = ChannelModel("AWGN", 0.5)
    assert capacity_reference_bits(channel) == pytest.approx(awgn_capacity_bits(2.0))
    assert capacity_reference_bits(ChannelModel("Rayleigh", 0.5)) < capacity_reference_bits(channel)


def test_sweep_rows_and_seeds():
    link = reference_bpsk_system()
    specs = [quick_spec(), quick_spec("MINE")]
    points = sweep_mi(link, specs, [0.0, 10.0], seed=5, disable_progress=True)
    assert [(p.estimator, p.ebn0_db, p.seed) for p in points] == [
        ("gammaDIME:1", 0.0, 5),
        ("MINE", 0.0, 5),
        ("gammaDIME:1", 10.0, 6),
        ("MINE", 10.0, 6),
    ]
    assert all(p.rate_bits == 1.0 for p in points)
    assert all(p.mi_bits == pytest.approx(p.mi_nats / np.log(2.0)) for p in points)
    again = sweep_mi(link, specs, [0.0, 10.0], seed=5, disable_progress=True)
    assert [p.mi_nats for p in points] == [p.mi_nats for p in again]


def test_sweep_warm_start_runs():
    points = sweep_mi(reference_bpsk_system(), [quick_spec()], [0.0, 5.0, 10.0], warm_start=True, disable_progress=True)
    assert len(points) == 3
    assert all(np.isfinite(p.mi_nats) for p in points)


def test_sweep_needs_estimators():
    with pytest.raises(ValidationError):
        sweep_mi(reference_bpsk_system(), [], [0.0], disable_progress=True)


# ---------------------------------------------------------------------------
# Gaussian benchmark
# ---------------------------------------------------------------------------

def test_gaussian_oracle_values():
    assert gaussian_mi_oracle(0.0, 7) == 0.0
    assert gaussian_mi_oracle(0.8, 1) == pytest.approx(0.5108, abs=1e-4)
    assert gaussian_mi_oracle(0.5, 10) == pytest.approx(1.438, abs=1e-3)
    with pytest.raises(ValidationError) as info:
        gaussian_mi_oracle(1.0, 1)
    assert info.value.key == "bench.rhos"


def test_correlated_source_statistics():
    xs, ys = CorrelatedGaussianSource(3, 0.5).sample(100000, np.random.default_rng(0))
    assert xs.shape == ys.shape == (100000, 3)
    corr = np.mean(xs * ys, axis=0)
    assert np.allclose(corr, 0.5, atol=0.02)
    assert np.allclose(np.var(ys, axis=0), 1.0, atol=0.02)


def test_benchmark_rows_and_seeds():
    specs = [quick_spec(), quick_spec("NWJ")]
    rows = run_gaussian_benchmark(specs, dims=(1, 2), rhos=(0.0, 0.5), seed=100, disable_progress=True)
    assert len(rows) == 8
    assert sorted({r.seed for r in rows}) == [100, 101, 102, 103]
    assert all(r.oracle_nats == gaussian_mi_oracle(r.rho, r.d) for r in rows)
    assert np.isfinite(mean_abs_error(rows, "NWJ", 2))
    assert isinstance(compare_estimators(rows, "gammaDIME:1", "NWJ", 1), bool)
    assert not compare_estimators(rows, "gammaDIME:1", "MINE", 1)


@pytest.mark.slow
def test_dime_beats_mine_at_high_dimension():
    require_slow()
    specs = [parse_estimator("gammaDIME:1"), parse_estimator("MINE")]
    rows = run_gaussian_benchmark(specs, dims=(10,), rhos=(0.5, 0.8), seed=2023, disable_progress=True)
    assert mean_abs_error(rows, "gammaDIME:1", 10, 0.5) <= mean_abs_error(rows, "MINE", 10, 0.5)


# ---------------------------------------------------------------------------
# Value landscape
# ---------------------------------------------------------------------------

def test_default_grid():
    grid = default_d_grid()
    assert grid[0] == pytest.approx(1e-3)
    assert grid[-1] == pytest.approx(3.0)
    assert grid.size == 3000


def test_landscape_unit_ratio():
    curves = value_landscape([0.5, 1.0, 2.0])
    for curve in curves:
        assert curve.d_max == pytest.approx(1.0, abs=1e-3)
    assert curves[1].max_value == pytest.approx(-1.0)


def test_landscape_maximizers():
    for ratio in (0.5, 1.0, 4.0):
        for gamma in (0.2, 0.5, 1.0, 2.0, 5.0):
            target = ratio ** (1.0 / gamma)
            grid = target * np.linspace(0.5, 1.5, 100001)
            (curve,) = value_landscape([gamma], ratio, grid)
            assert curve.analytic_d_max == pytest.approx(target)
            assert curve.d_max == pytest.approx(target, rel=2e-5), (gamma, ratio)


def test_landscape_known_point():
    (curve,) = value_landscape([2.0], 4.0)
    assert curve.d_max == pytest.approx(2.0, abs=1e-3)


def test_landscape_validation():
    with pytest.raises(ValidationError):
        value_landscape([])
    with pytest.raises(ValidationError):
        value_landscape([-1.0])
    with pytest.raises(ValidationError):
        value_landscape([1.0], ratio=0.0)
    with pytest.raises(ValidationError):
        value_landscape([1.0], d_grid=[0.0, 1.0])


# ---------------------------------------------------------------------------
# Result files
# ---------------------------------------------------------------------------

def test_bler_export_has_one_row_per_point():
    points = [BlerPoint(float(db), 1000, 10 - db, db) for db in range(5)]
    with tempfile.TemporaryDirectory() as tmp:
        path = export_results(points, Path(tmp) / "sub" / "bler.csv")
        rows = read_rows(path)
        raw = path.read_bytes()
    assert len(rows) == 5
    assert list(rows[0]) == ["ebn0_db", "blocks", "errors", "bler", "seed"]
    assert rows[2]["bler"] == repr(8 / 1000)
    assert b"\r" not in raw


def test_mi_export_is_sorted_and_reproducible():
    points = [
        MiSweepPoint("MINE", 10.0, 0.5, 0.72, 3.46, 2.0, 1),
        MiSweepPoint("MINE", 0.0, 0.4, 0.58, 1.0, 2.0, 0),
        MiSweepPoint("gammaDIME:1", 0.0, 0.3, 0.43, 1.0, 2.0, 0),
    ]
    with tempfile.TemporaryDirectory() as tmp:
        first = write_mi_csv(points, Path(tmp) / "a.csv")
        second = write_mi_csv(list(reversed(points)), Path(tmp) / "b.csv")
        rows = read_rows(first)
        assert first.read_bytes() == second.read_bytes()
    assert [(r["estimator"], r["ebn0_db"]) for r in rows] == [("MINE", "0.0"), ("MINE", "10.0"), ("gammaDIME:1", "0.0")]


def test_bench_export_sorted():
    rows = [
        BenchRow("NWJ", 5, 0.5, 0.7, 0.6, 3),
        BenchRow("MINE", 1, 0.8, 0.51, 0.49, 2),
        BenchRow("MINE", 1, 0.0, 0.0, 0.01, 0),
    ]
    with tempfile.TemporaryDirectory() as tmp:
        out = read_rows(write_bench_csv(rows, Path(tmp) / "bench.csv"))
    assert [(r["estimator"], r["rho"]) for r in out] == [("MINE", "0.0"), ("MINE", "0.8"), ("NWJ", "0.5")]
    assert float(out[0]["abs_error"]) == pytest.approx(0.01)


def test_landscape_export_rows():
    curves = value_landscape([0.5, 1.0], d_grid=[0.5, 1.0, 2.0])
    with tempfile.TemporaryDirectory() as tmp:
        rows = read_rows(export_results(curves, Path(tmp) / "landscape.csv"))
    assert len(rows) == 6
    assert isinstance(curves[0], LandscapeCurve)


def test_export_rejects_bad_lists():
    with pytest.raises(ValidationError):
        export_results([], "unused.csv")
    with pytest.raises(ValidationError):
        export_results([BlerPoint(0.0, 1, 0, 0), BenchRow("MINE", 1, 0.0, 0.0, 0.0, 0)], "unused.csv")
    with pytest.raises(ValidationError):
        export_results([object()], "unused.csv")


if __name__ == "__main__":
    sys.exit(run_tests(globals()))
