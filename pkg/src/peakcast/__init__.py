"""Daily peak-load forecasting toolkit.

Library layers, bottom up: box-bounded population optimizers (symbiotic
organism search plus a PSO baseline), an epsilon-SVR trained by a dual
coordinate solver, MRMR lag selection on binned mutual information, the
load-series data pipeline, and the forecast engine that wires them together.
"""

from .benchmarks import rastrigin, rosenbrock, sphere
from .data import (
    CalendarEncoding,
    DailySeries,
    FeatureMatrix,
    NormalizationState,
    SplitSpec,
    apply_normalization,
    build_lag_matrix,
    encode_calendar,
    fit_normalization,
    load_series,
    split_train_test,
    write_series,
)
from .engine import (
    FitnessEvaluator,
    ForecastReport,
    PipelineConfig,
    TuningSpec,
    decode_hyper_point,
    default_search_space,
    fitness,
    forecast_month,
    mape,
    run_pipeline,
    tune,
)
from .errors import (
    ConfigError,
    DataError,
    DimensionMismatchError,
    NonFiniteObjectiveError,
    NumericError,
    PeakcastError,
    PipelineStageError,
)
from .mrmr import (
    DiscretizedVariable,
    FeatureSet,
    SelectionResult,
    discretize,
    entropy,
    mutual_information,
    redundancy,
    relevance,
    select_features,
)
from .pso import pso_optimize
from .sos import (
    Ecosystem,
    OptimizationResult,
    OptimizerConfig,
    Organism,
    PsoParams,
    commensalism_step,
    mutualism_step,
    optimize,
    parasitism_step,
)
from .space import SearchSpace, clip_to_bounds
from .svr import (
    SvrHyperparameters,
    SvrModel,
    TrainingDiagnostics,
    TrainingProblem,
    epsilon_insensitive_loss,
    load_model,
    predict,
    predict_batch,
    rbf_kernel,
    save_model,
    train,
    verify_kkt,
)
from .synthetic import synthetic_series

__version__ = "0.1.0"
