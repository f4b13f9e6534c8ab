"""End-to-end forecasting: lag selection, hyperparameter tuning against a
validation fitness, final training, recursive month-ahead forecasting and
MAPE evaluation.

The tuning objective works on a 3-vector (log10 C, log10 gamma, epsilon).
Under the default holdout_last_month scheme it trains on all training rows
except the chronologically last calendar month and scores static true-lag
predictions of that month by MAPE in MW. Numerically failed trainings score
a large finite penalty so the optimizer keeps moving.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import mrmr, svr
from .data import (
    DailySeries,
    FeatureMatrix,
    NormalizationState,
    SplitSpec,
    apply_normalization,
    build_lag_matrix,
    encode_calendar,
    fit_normalization,
    split_train_test,
)
from .errors import ConfigError, DataError, NumericError, PipelineStageError
from .pso import pso_optimize
from .sos import OptimizationResult, OptimizerConfig, PsoParams, optimize
from .space import SearchSpace

logger = logging.getLogger(__name__)

PENALTY_FITNESS = 1e6

#: SOS consumes four objective evaluations per organism per iteration
#: (two mutualism, one commensalism, one parasitism); PSO consumes one per
#: particle. PSO iteration counts are scaled by this factor so both kernels
#: spend identical evaluation budgets.
PSO_BUDGET_FACTOR = 4


def default_search_space() -> SearchSpace:
    """log10 C in [-2, 4], log10 gamma in [-4, 2], epsilon in [0, 0.2]."""
    return SearchSpace(lower=np.array([-2.0, -4.0, 0.0]), upper=np.array([4.0, 2.0, 0.2]))


def decode_hyper_point(point) -> svr.SvrHyperparameters:
    point = np.asarray(point, dtype=float)
    return svr.SvrHyperparameters(
        cost_c=float(10.0 ** point[0]),
        epsilon=float(point[2]),
        gamma=float(10.0 ** point[1]),
    )


def mape(actuals, predictions) -> float:
    """100 * mean(|actual - predicted| / actual); actuals must be positive."""
    actuals = np.asarray(actuals, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if actuals.size == 0 or actuals.shape != predictions.shape:
        raise NumericError(
            f"mape needs equal non-empty vectors, got {actuals.shape} vs {predictions.shape}"
        )
    if not (actuals > 0).all():
        raise NumericError("mape requires strictly positive actuals")
    return float(100.0 * np.mean(np.abs(actuals - predictions) / actuals))


@dataclass
class TuningSpec:
    optimizer_config: OptimizerConfig
    search_space: SearchSpace = field(default_factory=default_search_space)
    scheme: str = "holdout_last_month"
    kfold_k: int = 3
    solver_tolerance: float = 1e-3
    max_passes: int = 10_000

    def __post_init__(self):
        if self.search_space.dimension != 3:
            raise ConfigError(
                f"hyperparameter space must be 3-D, got {self.search_space.dimension}"
            )
        if self.scheme not in ("holdout_last_month", "kfold"):
            raise ConfigError(f"unknown fitness scheme {self.scheme!r}")
        if self.scheme == "kfold" and self.kfold_k < 2:
            raise ConfigError(f"kfold needs k >= 2, got {self.kfold_k}")


class FitnessEvaluator:
    """Callable tuning objective with fold geometry precomputed once.

    Pairwise squared distances between (fixed) normalized rows are cached,
    so each evaluation only exponentiates them with the candidate gamma and
    runs the dual solver.
    """

    def __init__(
        self,
        train_matrix: FeatureMatrix,
        scheme: str = "holdout_last_month",
        kfold_k: int = 3,
        solver_tolerance: float = 1e-3,
        max_passes: int = 10_000,
    ):
        if train_matrix.normalization is None:
            raise ConfigError("fitness needs a normalized training matrix")
        if len(train_matrix) < 3:
            raise DataError("training matrix too small for a validation split")
        self.state = train_matrix.normalization
        self.solver_tolerance = solver_tolerance
        self.max_passes = max_passes

        if scheme == "holdout_last_month":
            folds = [self._holdout_indices(train_matrix)]
        else:
            folds = self._kfold_indices(train_matrix, kfold_k)

        self._folds = []
        rows, targets = train_matrix.rows, train_matrix.targets
        for fit_idx, val_idx in folds:
            fit_rows = rows[fit_idx]
            val_rows = rows[val_idx]
            self._folds.append(
                dict(
                    y_fit=targets[fit_idx],
                    d2_fit=svr.squared_distances(fit_rows, fit_rows),
                    d2_cross=svr.squared_distances(val_rows, fit_rows),
                    actual_mw=np.asarray(self.state.invert_target(targets[val_idx])),
                )
            )

    @staticmethod
    def _holdout_indices(matrix: FeatureMatrix):
        last = max((d.year, d.month) for d in matrix.row_dates)
        val = [i for i, d in enumerate(matrix.row_dates) if (d.year, d.month) == last]
        fit = [i for i, d in enumerate(matrix.row_dates) if (d.year, d.month) != last]
        if not fit:
            raise DataError("holdout fitness leaves no rows to train on")
        return np.array(fit), np.array(val)

    @staticmethod
    def _kfold_indices(matrix: FeatureMatrix, k: int):
        if len(matrix) < k:
            raise DataError(f"cannot make {k} folds from {len(matrix)} rows")
        blocks = np.array_split(np.arange(len(matrix)), k)
        folds = []
        for held in range(k):
            val = blocks[held]
            fit = np.concatenate([blocks[b] for b in range(k) if b != held])
            folds.append((fit, val))
        return folds

    def __call__(self, point) -> float:
        return self.evaluate_hyper(decode_hyper_point(point))

    def evaluate_hyper(self, hyper: svr.SvrHyperparameters) -> float:
        try:
            scores = [self._fold_mape(f, hyper) for f in self._folds]
        except NumericError as exc:
            logger.warning("fitness penalty at %s: %s", hyper, exc)
            return PENALTY_FITNESS
        return float(np.mean(scores))

    def _fold_mape(self, fold: dict, hyper: svr.SvrHyperparameters) -> float:
        K = np.exp(-hyper.gamma * fold["d2_fit"])
        beta, b_lo, b_hi, _, _ = svr._solve_dual(
            K,
            fold["y_fit"],
            hyper.cost_c,
            hyper.epsilon,
            self.solver_tolerance,
            self.max_passes,
        )
        if not np.isfinite(beta).all():
            raise NumericError("dual solver produced non-finite coefficients")
        g = K @ beta
        bias = svr._bias_from_solution(
            beta, g, fold["y_fit"], hyper.cost_c, hyper.epsilon, b_lo, b_hi
        )
        if not np.isfinite(bias):
            raise NumericError("non-finite bias")
        pred = np.exp(-hyper.gamma * fold["d2_cross"]) @ beta + bias
        return mape(fold["actual_mw"], self.state.invert_target(pred))


def fitness(
    hyper_point,
    train_matrix: FeatureMatrix,
    scheme: str = "holdout_last_month",
    kfold_k: int = 3,
    solver_tolerance: float = 1e-3,
    max_passes: int = 10_000,
) -> float:
    """Standalone evaluation of one hyperparameter point (same arithmetic as
    the evaluator the tuner uses)."""
    evaluator = FitnessEvaluator(
        train_matrix, scheme, kfold_k, solver_tolerance, max_passes
    )
    return evaluator(hyper_point)


def tune(
    train_matrix: FeatureMatrix, spec: TuningSpec
) -> tuple[svr.SvrHyperparameters, OptimizationResult]:
    """Minimize the validation fitness over the 3-D hyperparameter box.

    The search-space center is seeded into the initial population, so the
    tuned fitness never exceeds the center point's. With the pso kernel the
    iteration count is scaled to equalize total objective evaluations.
    """
    evaluator = FitnessEvaluator(
        train_matrix,
        spec.scheme,
        spec.kfold_k,
        spec.solver_tolerance,
        spec.max_passes,
    )
    config = spec.optimizer_config
    center = spec.search_space.center[None, :]
    if config.algorithm == "pso":
        config = replace(
            config,
            max_iterations=config.max_iterations * PSO_BUDGET_FACTOR,
            pso_params=config.pso_params or PsoParams(),
        )
        result = pso_optimize(evaluator, spec.search_space, config, initial_positions=center)
    else:
        result = optimize(evaluator, spec.search_space, config, initial_positions=center)
    return decode_hyper_point(result.best_position), result


def forecast_month(
    model: svr.SvrModel,
    series: DailySeries,
    horizon_dates,
    lag_set,
    holidays=None,
    normalization: Optional[NormalizationState] = None,
    week_start: int = 0,
) -> list:
    """Recursive day-by-day forecast: lag dates inside the horizon read the
    already-forecast values, everything earlier reads actual history.

    Returns [(date, predicted MW)] in horizon order.
    """
    horizon = list(horizon_dates)
    if not horizon:
        return []
    for a, b in zip(horizon, horizon[1:]):
        if (b - a).days != 1:
            raise DataError(f"horizon dates must be consecutive, got {a} -> {b}")
    if holidays is None:
        holidays = series.holidays
    lag_set = tuple(int(k) for k in lag_set)

    state = model.normalization if model.normalization is not None else normalization
    history = {d: float(v) for d, v in series.records if d < horizon[0]}

    out = []
    for day in horizon:
        lag_days = [day - dt.timedelta(days=k) for k in lag_set]
        missing = [d for d in lag_days if d not in history]
        if missing:
            raise DataError(
                f"cannot forecast {day.isoformat()}: no value for lag date "
                f"{missing[0].isoformat()}"
            )
        row = np.concatenate(
            [
                [history[d] for d in lag_days],
                encode_calendar(day, holidays, week_start).as_vector(),
            ]
        )
        if model.normalization is not None:
            value = svr.predict(model, row)
        elif state is not None:
            value = float(state.invert_target(svr.predict(model, state.apply_features(row))))
        else:
            value = svr.predict(model, row)
        history[day] = value
        out.append((day, value))
    return out


@dataclass
class PipelineConfig:
    """Engine-level knobs for one end-to-end run."""

    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    search_space: SearchSpace = field(default_factory=default_search_space)
    scheme: str = "holdout_last_month"
    kfold_k: int = 3
    candidate_lag_count: int = 60
    mrmr_k: int = 10
    mrmr_bins: int = 8
    user_lags: Optional[tuple] = None
    split: SplitSpec = field(default_factory=SplitSpec)
    week_start: int = 0
    solver_tolerance: float = 1e-3
    max_passes: int = 10_000


@dataclass
class ForecastReport:
    """Per-day forecast vs. actuals plus everything needed to reproduce the run."""

    per_day: list  # (date, actual MW or None, predicted MW)
    mape_percent: Optional[float]
    tuned_hyperparameters: svr.SvrHyperparameters
    selected_lags: tuple
    seed: int
    algorithm: str
    lag_selection_mode: str
    dropped_row_count: int
    fitness_history: np.ndarray
    tuned_fitness: float


def _month_days(year: int, month: int) -> list:
    day = dt.date(year, month, 1)
    out = []
    while day.month == month:
        out.append(day)
        day += dt.timedelta(days=1)
    return out


def select_lags(
    train_matrix: FeatureMatrix, k: int, bins: int = 8
) -> mrmr.SelectionResult:
    """Rank candidate lag columns against the target on training rows only."""
    features = [
        mrmr.discretize(train_matrix.rows[:, i], bins)
        for i in range(train_matrix.lag_count)
    ]
    names = [f"lag_{lag}" for lag in train_matrix.lag_set]
    feature_set = mrmr.FeatureSet(
        features=tuple(features),
        names=tuple(names),
        target=mrmr.discretize(train_matrix.targets, bins),
    )
    return mrmr.select_features(feature_set, k)


def run_pipeline(series: DailySeries, holidays, config: PipelineConfig) -> ForecastReport:
    """Full method: candidate lags, selection, tuning, training, recursive
    forecast of the configured test month, MAPE against available actuals."""
    if holidays is None:
        holidays = series.holidays

    def stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PipelineStageError:
            raise
        except Exception as exc:
            raise PipelineStageError(name, exc) from exc

    if config.user_lags is not None:
        selected_lags = tuple(int(k) for k in config.user_lags)
        mode = "user"
    else:
        candidates = stage(
            "candidate-matrix",
            build_lag_matrix,
            series,
            range(1, config.candidate_lag_count + 1),
            holidays,
            config.week_start,
        )
        cand_train, _ = stage("candidate-split", split_train_test, candidates, config.split)
        selection = stage("lag-selection", select_lags, cand_train, config.mrmr_k, config.mrmr_bins)
        selected_lags = tuple(
            cand_train.lag_set[i] for i in selection.selected_indices
        )
        mode = "mrmr"

    matrix = stage("matrix", build_lag_matrix, series, selected_lags, holidays, config.week_start)
    train_raw, test_raw = stage("split", split_train_test, matrix, config.split)
    state = stage("normalize", fit_normalization, train_raw)
    train_norm = apply_normalization(train_raw, state)

    spec = TuningSpec(
        optimizer_config=config.optimizer,
        search_space=config.search_space,
        scheme=config.scheme,
        kfold_k=config.kfold_k,
        solver_tolerance=config.solver_tolerance,
        max_passes=config.max_passes,
    )
    hyper, opt_result = stage("tune", tune, train_norm, spec)

    model, _ = stage(
        "train",
        svr.train,
        svr.TrainingProblem(train_raw.rows, train_raw.targets),
        hyper,
        config.solver_tolerance,
        config.max_passes,
        state,
    )

    horizon = _month_days(config.split.test_year, config.split.test_month)
    forecasts = stage(
        "forecast",
        forecast_month,
        model,
        series,
        horizon,
        selected_lags,
        holidays,
        state,
        config.week_start,
    )

    by_date = series.as_mapping()
    per_day = [
        (day, float(by_date[day]) if day in by_date else None, value)
        for day, value in forecasts
    ]
    if per_day and all(actual is not None for _, actual, _ in per_day):
        score = stage(
            "evaluate",
            mape,
            np.array([actual for _, actual, _ in per_day]),
            np.array([value for _, _, value in per_day]),
        )
    else:
        score = None

    return ForecastReport(
        per_day=per_day,
        mape_percent=score,
        tuned_hyperparameters=hyper,
        selected_lags=selected_lags,
        seed=config.optimizer.seed,
        algorithm=config.optimizer.algorithm,
        lag_selection_mode=mode,
        dropped_row_count=matrix.dropped_count,
        fitness_history=opt_result.fitness_history,
        tuned_fitness=opt_result.best_fitness,
    )


# --- report serialization ----------------------------------------------------


def report_to_json_text(report: ForecastReport) -> str:
    """Stable-key-order structured document; byte-identical for identical runs."""
    doc = {
        "mape_percent": report.mape_percent,
        "tuned_hyperparameters": {
            "cost_c": report.tuned_hyperparameters.cost_c,
            "epsilon": report.tuned_hyperparameters.epsilon,
            "gamma": report.tuned_hyperparameters.gamma,
        },
        "tuned_fitness": report.tuned_fitness,
        "selected_lags": list(report.selected_lags),
        "lag_selection_mode": report.lag_selection_mode,
        "algorithm": report.algorithm,
        "seed": report.seed,
        "dropped_row_count": report.dropped_row_count,
        "per_day": [
            {
                "date": day.isoformat(),
                "actual": actual,
                "predicted": value,
            }
            for day, actual, value in report.per_day
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def report_to_csv_text(report: ForecastReport) -> str:
    lines = ["date,actual,predicted"]
    for day, actual, value in report.per_day:
        actual_s = "" if actual is None else repr(actual)
        lines.append(f"{day.isoformat()},{actual_s},{value!r}")
    return "\n".join(lines) + "\n"


def fitness_history_csv_text(report: ForecastReport) -> str:
    lines = ["iteration,best_fitness"]
    for i, value in enumerate(report.fitness_history, start=1):
        lines.append(f"{i},{float(value)!r}")
    return "\n".join(lines) + "\n"
