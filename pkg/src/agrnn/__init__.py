"""Feature selection and kernel regression with anisotropic GRNN bandwidths.

The package learns one Gaussian kernel bandwidth per input feature by
minimizing a leave-one-out regression loss with a limited-memory quasi-Newton
optimizer; features whose optimized bandwidth stays at or below a threshold
are declared relevant.  It ships synthetic dataset generators, reference
feature-selection baselines, a benchmark harness and a command-line
interface.
"""

from .baselines import (
    ScoreVector,
    cfs_merit,
    cfs_select,
    ftest_scores,
    mi_scores,
    rrelieff_scores,
    top_k,
)
from .benchmark import (
    BenchmarkConfig,
    BenchmarkReport,
    MethodResult,
    emit_report,
    run_benchmark,
)
from .data import Dataset, ScalingRecord, min_max_scale
from .datasets import (
    DEFAULT_WEIGHT_SEED,
    ButterflySpec,
    FriedmanSpec,
    load_csv,
    make_butterfly,
    make_friedman,
    save_csv,
    shuffle_column,
)
from .errors import (
    ConstantColumnWarning,
    DroppedRowsWarning,
    InputError,
    NumericalError,
)
from .grnn import GRNNRegressor, log_kernel, predict, predict_batch
from .loss import LeaveOneOutObjective, LossReport, loo_loss, loo_loss_grad
from .optim import OptimResult, OptimizerConfig, minimize
from .selector import (
    BandwidthSelector,
    ImportanceReport,
    SelectionResult,
    select,
    shuffle_importance,
)

__version__ = "0.1.0"

__all__ = [
    "BandwidthSelector",
    "BenchmarkConfig",
    "BenchmarkReport",
    "ButterflySpec",
    "ConstantColumnWarning",
    "DEFAULT_WEIGHT_SEED",
    "Dataset",
    "DroppedRowsWarning",
    "FriedmanSpec",
    "GRNNRegressor",
    "ImportanceReport",
    "InputError",
    "LeaveOneOutObjective",
    "LossReport",
    "MethodResult",
    "NumericalError",
    "OptimResult",
    "OptimizerConfig",
    "ScalingRecord",
    "ScoreVector",
    "SelectionResult",
    "cfs_merit",
    "cfs_select",
    "emit_report",
    "ftest_scores",
    "load_csv",
    "log_kernel",
    "loo_loss",
    "loo_loss_grad",
    "make_butterfly",
    "make_friedman",
    "mi_scores",
    "min_max_scale",
    "minimize",
    "predict",
    "predict_batch",
    "rrelieff_scores",
    "run_benchmark",
    "save_csv",
    "select",
    "shuffle_column",
    "shuffle_importance",
    "top_k",
]
