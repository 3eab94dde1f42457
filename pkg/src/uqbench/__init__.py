"""uqbench: selective prediction, calibration, and class-OOD evaluation
over classifier prediction logs."""

from ._backend import BACKEND
from .coodgen import (
    ClassPool,
    PoolClass,
    SeverityLevels,
    SeverityProfile,
    build_pool_from_logs,
    build_pool_from_scores,
    build_severity_levels,
    class_severity,
    detection_auroc,
    filter_pool,
    load_pool_csv,
    severity_profile,
)
from .errors import (
    IncompatibleKappaError,
    LogFormatError,
    PoolError,
    ScoreRangeError,
    UQBenchError,
)
from .kappa import (
    KappaSpec,
    ScoreVector,
    TemperatureFit,
    fit_temperature,
    mc_aggregate,
    negative_entropy,
    score_log,
    softmax,
    softmax_response,
)
from .metrics import (
    MetricReport,
    RCCurve,
    Undefined,
    aurc,
    aurc_over_coverages,
    auroc,
    brier,
    e_aurc,
    ece,
    gamma_from_auroc,
    nll,
    optimal_aurc,
    rc_curve,
    sac_coverage,
    spearman,
)
from .predlog import (
    LogKind,
    PredictionLog,
    SplitAssignment,
    load_log,
    make_log,
    save_log,
    stratified_split,
    subsample_class,
)

__version__ = "0.1.0"
