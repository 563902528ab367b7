# Command-line module for the capacity toolkit
# Run configs, the gradient-check suite and the subcommand implementations

from .commands import EVAL_MODES, cmd_bench_estimators, cmd_eval, cmd_gradcheck, cmd_landscape, cmd_train_ae, sibling_path
from .gradcheck_suite import GradCheckCase, default_cases, run_suite
from .run_config import BenchSettings, EvalSettings, RunConfig, build_run_config, load_run_config, parse_grid, resolve_seed
