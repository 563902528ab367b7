#!/usr/bin/env python3
"""
Subcommand implementations

Each command loads what it needs, runs one workflow and writes its result
files. Commands raise the toolkit's exceptions; mapping them to exit codes
is left to the entry point.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..autoencoder import AETrainingReport, LinkSystem, train_autoencoder
from ..diffcore import GradCheckReport
from ..evalharness import (
    LandscapeCurve,
    compare_estimators,
    default_d_grid,
    is_monotone_non_increasing,
    run_gaussian_benchmark,
    simulate_bler,
    sweep_mi,
    value_landscape,
    write_ae_report_csv,
    write_bench_csv,
    write_bler_csv,
    write_gradcheck_csv,
    write_landscape_csv,
    write_maximizer_csv,
    write_mi_csv,
    write_trace_csv,
)
from ..errors import ValidationError
from .gradcheck_suite import GradCheckCase, run_suite
from .run_config import load_run_config

# Set up logging
logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
EVAL_MODES = ("bler", "mi")


def sibling_path(out_path: PathLike, suffix: str) -> Path:
    """out/model.params + "trace" -> out/model_trace.csv"""
    out_path = Path(out_path)
    return out_path.with_name(f"{out_path.stem}_{suffix}.csv")


def cmd_train_ae(
    config_path: PathLike,
    out_path: PathLike,
    seed: Optional[int] = None,
    disable_progress: bool = False,
) -> Tuple[LinkSystem, AETrainingReport]:
    """
    Train an autoencoder and save it.

    Writes the parameter file at out_path, the discriminator trace next to it
    (<stem>_trace.csv) and the autoencoder report (<stem>_report.csv).
    """
    config = load_run_config(config_path, seed)
    rng = np.random.default_rng(config.seed)
    system, report = train_autoencoder(config.ae, rng, disable_progress=disable_progress)

    system.save(out_path)
    write_trace_csv(report.estimator_trace, sibling_path(out_path, "trace"))
    write_ae_report_csv(report, sibling_path(out_path, "report"))

    final = report.final
    print(
        f"AE(M={config.ae.M}, n={config.ae.n}) R={config.ae.rate:.4f} bits/use: "
        f"loss {final.loss:.5f}, training BLER {report.trailing_bler():.4f}, "
        f"MI {report.smoothed_mi_bits:.4f} bits/codeword"
    )
    return system, report


def cmd_eval(
    model_path: PathLike,
    config_path: PathLike,
    mode: str,
    out_path: PathLike,
    seed: Optional[int] = None,
    disable_progress: bool = False,
) -> list:
    """
    Evaluate a saved link: BLER over the grid or an MI sweep.

    Raises:
        ValidationError: unknown mode or invalid config
        ShapeError: the model's (M, n) differ from the config's
        FileNotFoundError: model or config missing
    """
    if mode not in EVAL_MODES:
        raise ValidationError(f"unknown mode '{mode}', expected one of {EVAL_MODES}", key="--mode")
    config = load_run_config(config_path, seed)
    system = LinkSystem.load(model_path)
    system.check_shape(config.ae.M, config.ae.n)
    grid = config.eval.ebn0_grid

    if mode == "bler":
        points = simulate_bler(
            system, grid, config.eval.min_errors, config.eval.max_blocks, config.seed, disable_progress
        )
        is_monotone_non_increasing(points)
        write_bler_csv(points, out_path)
        return points

    points = sweep_mi(system, config.mi_estimators(), grid, config.seed, config.eval.warm_start, disable_progress)
    ceiling = system.rate + 0.1
    for p in points:
        if p.estimator.startswith(("dDIME", "fDIME", "gammaDIME")) and p.mi_bits > ceiling:
            logger.warning(f"{p.estimator} at {p.ebn0_db} dB: {p.mi_bits:.4f} bits exceeds R + 0.1 = {ceiling:.4f}")
    write_mi_csv(points, out_path)
    return points


def cmd_bench_estimators(
    config_path: PathLike,
    out_path: PathLike,
    seed: Optional[int] = None,
    disable_progress: bool = False,
) -> list:
    """Run the correlated-Gaussian suite and write estimate vs oracle rows"""
    config = load_run_config(config_path, seed)
    specs = config.bench_estimators()
    rows = run_gaussian_benchmark(specs, config.bench.dims, config.bench.rhos, config.seed, disable_progress)

    labels = {s.label for s in specs}
    if "gammaDIME:1" in labels and "MINE" in labels:
        for d in config.bench.dims:
            compare_estimators(rows, "gammaDIME:1", "MINE", d, min_oracle=0.5)
    write_bench_csv(rows, out_path)
    return rows


def cmd_gradcheck(
    out_path: Optional[PathLike] = None,
    seed: int = 0,
    cases: Optional[Sequence[GradCheckCase]] = None,
) -> Tuple[List[Tuple[str, GradCheckReport]], bool]:
    """
    Run the gradient-check suite.

    Returns:
        (per-case results, whether every case passed)
    """
    results = run_suite(cases, seed)
    failed = [name for name, report in results if not report.passed]
    worst = max(report.max_rel_error for _, report in results)
    print(f"gradcheck: {len(results) - len(failed)}/{len(results)} passed, max rel error {worst:.3e}")
    for name in failed:
        report = dict(results)[name]
        print(
            f"  FAILED {name}: rel error {report.max_rel_error:.3e} at {report.worst_parameter}{report.worst_index} "
            f"(analytic {report.analytic:.6g}, numeric {report.numeric:.6g})"
        )
    if out_path is not None:
        write_gradcheck_csv(results, out_path)
    return results, not failed


def cmd_landscape(
    gammas: Sequence[float],
    ratio: float,
    out_path: PathLike,
    d_max: Optional[float] = None,
    step: Optional[float] = None,
) -> List[LandscapeCurve]:
    """
    Write value curves (gamma,d,value) and their maximizers (<stem>_maximizers.csv).

    Raises:
        ValidationError: empty gamma list or non-positive gamma/ratio
    """
    if not gammas:
        raise ValidationError("at least one gamma is required", key="--gamma")
    grid = default_d_grid(d_max or 3.0, step or 1e-3)
    curves = value_landscape(gammas, ratio, grid)
    write_landscape_csv(curves, out_path)
    write_maximizer_csv(curves, sibling_path(out_path, "maximizers"))
    for c in curves:
        print(f"gamma={c.gamma:g} R={c.ratio:g}: max {c.max_value:.6f} at D={c.d_max:.4f} (R^(1/gamma)={c.analytic_d_max:.4f})")
    return curves
