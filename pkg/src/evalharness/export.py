#!/usr/bin/env python3
"""
Result files

Every writer emits a header row and LF line endings, formats floats with
repr so values survive a round trip, and orders rows deterministically.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from ..errors import ValidationError
from ..estimators import EstimatorTrace
from .bler import BlerPoint
from .gaussian_bench import BenchRow
from .landscape import LandscapeCurve
from .mi_sweep import MiSweepPoint

# Set up logging
logger = logging.getLogger(__name__)

BLER_FIELDS = ["ebn0_db", "blocks", "errors", "bler", "seed"]
MI_FIELDS = ["estimator", "ebn0_db", "mi_nats", "mi_bits", "capacity_bits", "rate_bits", "seed"]
LANDSCAPE_FIELDS = ["gamma", "d", "value"]
MAXIMIZER_FIELDS = ["gamma", "ratio", "d_max"]
TRACE_FIELDS = ["iter", "value", "mi_nats", "mi_bits", "clip_events"]
BENCH_FIELDS = ["estimator", "d", "rho", "oracle_nats", "estimate_nats", "abs_error", "seed"]
AE_REPORT_FIELDS = ["iter", "loss", "cross_entropy", "mi_nats", "mi_bits", "bler"]
GRADCHECK_FIELDS = ["check", "max_rel_error", "passed"]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Union[str, Path], fieldnames: List[str], rows: Sequence[Dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def write_bler_csv(points: Sequence[BlerPoint], path) -> Path:
    rows = [
        {"ebn0_db": float(p.ebn0_db), "blocks": p.blocks, "errors": p.errors, "bler": float(p.bler), "seed": p.seed}
        for p in points
    ]
    return write_csv(path, BLER_FIELDS, rows)


def write_mi_csv(points: Sequence[MiSweepPoint], path) -> Path:
    ordered = sorted(points, key=lambda p: (p.estimator, p.ebn0_db))
    rows = [
        {
            "estimator": p.estimator,
            "ebn0_db": float(p.ebn0_db),
            "mi_nats": float(p.mi_nats),
            "mi_bits": float(p.mi_bits),
            "capacity_bits": float(p.capacity_bits),
            "rate_bits": float(p.rate_bits),
            "seed": p.seed,
        }
        for p in ordered
    ]
    return write_csv(path, MI_FIELDS, rows)


def write_landscape_csv(curves: Sequence[LandscapeCurve], path) -> Path:
    rows = [
        {"gamma": float(c.gamma), "d": float(d), "value": float(v)}
        for c in curves
        for d, v in zip(c.d, c.values)
    ]
    return write_csv(path, LANDSCAPE_FIELDS, rows)


def write_maximizer_csv(curves: Sequence[LandscapeCurve], path) -> Path:
    rows = [{"gamma": float(c.gamma), "ratio": float(c.ratio), "d_max": c.d_max} for c in curves]
    return write_csv(path, MAXIMIZER_FIELDS, rows)


def write_trace_csv(trace: EstimatorTrace, path) -> Path:
    rows = [
        {
            "iter": r.iteration,
            "value": float(r.value),
            "mi_nats": float(r.mi_nats),
            "mi_bits": float(r.mi_bits),
            "clip_events": r.clip_events,
        }
        for r in trace.rows
    ]
    return write_csv(path, TRACE_FIELDS, rows)


def write_bench_csv(rows: Sequence[BenchRow], path) -> Path:
    ordered = sorted(rows, key=lambda r: (r.estimator, r.d, r.rho))
    return write_csv(
        path,
        BENCH_FIELDS,
        [
            {
                "estimator": r.estimator,
                "d": r.d,
                "rho": float(r.rho),
                "oracle_nats": float(r.oracle_nats),
                "estimate_nats": float(r.estimate_nats),
                "abs_error": float(r.abs_error),
                "seed": r.seed,
            }
            for r in ordered
        ],
    )


def write_ae_report_csv(report, path) -> Path:
    rows = [
        {
            "iter": r.iteration,
            "loss": float(r.loss),
            "cross_entropy": float(r.cross_entropy),
            "mi_nats": float(r.mi_nats),
            "mi_bits": float(r.mi_bits),
            "bler": float(r.bler),
        }
        for r in report.rows
    ]
    return write_csv(path, AE_REPORT_FIELDS, rows)


def write_gradcheck_csv(results: Sequence, path) -> Path:
    rows = [{"check": name, "max_rel_error": float(r.max_rel_error), "passed": r.passed} for name, r in results]
    return write_csv(path, GRADCHECK_FIELDS, rows)


_WRITERS = {
    BlerPoint: write_bler_csv,
    MiSweepPoint: write_mi_csv,
    LandscapeCurve: write_landscape_csv,
    BenchRow: write_bench_csv,
}


def export_results(points: Sequence, path: Union[str, Path]) -> Path:
    """
    Write a homogeneous result list with the schema of its element type.

    Raises:
        ValidationError: empty or mixed result list, or an unknown element type
        OSError: the path cannot be written
    """
    if not points:
        raise ValidationError("nothing to export")
    kind = type(points[0])
    if kind not in _WRITERS:
        raise ValidationError(f"no result schema for {kind.__name__}")
    if any(type(p) is not kind for p in points):
        raise ValidationError("cannot export a mixed result list")
    return _WRITERS[kind](points, path)
