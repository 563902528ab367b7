# Evaluation module for the capacity toolkit
# BLER Monte-Carlo, MI sweeps, the Gaussian benchmark, value landscapes and result files

from .bler import (
    BlerPoint,
    ReferenceBpskLink,
    codebook,
    is_monotone_non_increasing,
    reference_bpsk_system,
    simulate_bler,
)
from .export import (
    export_results,
    write_ae_report_csv,
    write_bench_csv,
    write_bler_csv,
    write_gradcheck_csv,
    write_landscape_csv,
    write_maximizer_csv,
    write_mi_csv,
    write_trace_csv,
)
from .gaussian_bench import (
    BenchRow,
    CorrelatedGaussianSource,
    compare_estimators,
    gaussian_mi_oracle,
    mean_abs_error,
    run_gaussian_benchmark,
)
from .landscape import DEFAULT_D_MAX, LandscapeCurve, default_d_grid, value_landscape
from .mi_sweep import LinkSampler, MiSweepPoint, capacity_reference_bits, sweep_mi
