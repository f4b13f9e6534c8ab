"""Command-line surface: lag selection, full forecasting runs, and the
optimizer/selection ablation matrix.

All commands read one JSON config file; a few flags override it. Exit codes:
0 success, 2 config error, 3 data error, 4 numeric failure.

Config keys (all optional except load_csv):

    load_csv        path to the daily peak-load CSV (header: date,peak_load)
    holiday_file    path to the holiday list (one ISO date per line)
    output_dir      where artifacts are written (default "out")
    lag_selection   {"mode": "mrmr", "k": 10} or {"mode": "user", "lags": [...]}
    user_lags       lag list used by the compare command's user-lag cells
    candidate_lags  size of the candidate lag pool (default 60)
    mrmr_bins       discretization bins for mutual information (default 8)
    optimizer       {"algorithm": "sos"|"pso", "population_size", "max_iterations",
                     "seed", "parasite_mode"}
    pso             {"inertia", "cognitive", "social"}
    fitness         {"scheme": "holdout_last_month"} or {"scheme": "kfold", "k": 3}
    split           {"train_years", "train_months", "test_year", "test_month"}
    search_space    {"log10_cost": [lo, hi], "log10_gamma": [lo, hi],
                     "epsilon": [lo, hi]}
    week_start      weekday name that starts the week (default "monday")
    compare_seeds   seed list for the compare command
    jobs            parallel workers for the compare command (default 1)
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import mrmr
from .data import SplitSpec, build_lag_matrix, load_series, parse_week_start, split_train_test
from .engine import (
    PipelineConfig,
    fitness_history_csv_text,
    report_to_csv_text,
    report_to_json_text,
    run_pipeline,
    select_lags,
)
from .errors import ConfigError, DataError, NumericError, PeakcastError, PipelineStageError
from .plotting import forecast_svg
from .sos import OptimizerConfig, PsoParams
from .space import SearchSpace

_CONFIG_KEYS = {
    "load_csv", "holiday_file", "output_dir", "lag_selection", "user_lags",
    "candidate_lags", "mrmr_bins", "optimizer", "pso", "fitness", "split",
    "search_space", "week_start", "compare_seeds", "jobs",
}

PAPER_USER_LAGS = (1, 2, 3, 4, 6, 7, 8, 14, 26, 28)

COMPARE_CELLS = (  # fixed report row order
    ("pso", "user"),
    ("pso", "mrmr"),
    ("sos", "user"),
    ("sos", "mrmr"),
)


@dataclass
class RunConfig:
    load_csv: str
    holiday_file: str | None
    output_dir: str
    pipeline: PipelineConfig
    mrmr_k: int
    user_lags: tuple
    compare_seeds: tuple
    jobs: int


def _require(mapping, key, kind, context):
    value = mapping.get(key)
    if not isinstance(value, kind):
        raise ConfigError(f"{context}.{key} must be {kind.__name__}, got {value!r}")
    return value


def load_config(path: str) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if "load_csv" not in raw:
        raise ConfigError("config is missing required key load_csv")

    opt = raw.get("optimizer", {})
    pso = raw.get("pso", {})
    optimizer = OptimizerConfig(
        population_size=int(opt.get("population_size", 30)),
        max_iterations=int(opt.get("max_iterations", 100)),
        seed=int(opt.get("seed", 1)),
        algorithm=str(opt.get("algorithm", "sos")),
        parasite_mode=str(opt.get("parasite_mode", "subset_resample")),
        pso_params=PsoParams(
            inertia=float(pso.get("inertia", 0.72)),
            cognitive=float(pso.get("cognitive", 1.49)),
            social=float(pso.get("social", 1.49)),
        ),
    )
    optimizer.validate()

    selection = raw.get("lag_selection", {"mode": "mrmr", "k": 10})
    mode = selection.get("mode", "mrmr")
    if mode == "mrmr":
        k = int(selection.get("k", 10))
        user_lags_for_run = None
    elif mode == "user":
        lags = selection.get("lags")
        if not isinstance(lags, list) or not lags:
            raise ConfigError("lag_selection.lags must be a non-empty list in user mode")
        k = int(selection.get("k", 10))
        user_lags_for_run = tuple(int(v) for v in lags)
    else:
        raise ConfigError(f"lag_selection.mode must be 'mrmr' or 'user', got {mode!r}")
    candidate_lags = int(raw.get("candidate_lags", 60))
    if k < 1 or k > candidate_lags:
        raise ConfigError(f"lag_selection.k must be in 1..{candidate_lags}, got {k}")

    fit = raw.get("fitness", {"scheme": "holdout_last_month"})
    scheme = fit.get("scheme", "holdout_last_month")
    kfold_k = int(fit.get("k", 3))

    split_raw = raw.get("split", {})
    split = SplitSpec(
        train_years=tuple(int(y) for y in split_raw.get("train_years", (1997, 1998))),
        train_months=tuple(
            int(m) for m in split_raw.get("train_months", (1, 2, 3, 10, 11, 12))
        ),
        test_year=int(split_raw.get("test_year", 1999)),
        test_month=int(split_raw.get("test_month", 1)),
    )
    if not all(1 <= m <= 12 for m in split.train_months + (split.test_month,)):
        raise ConfigError("split months must be in 1..12")

    space_raw = raw.get("search_space", {})
    log_c = space_raw.get("log10_cost", (-2.0, 4.0))
    log_g = space_raw.get("log10_gamma", (-4.0, 2.0))
    eps = space_raw.get("epsilon", (0.0, 0.2))
    for name, pair in (("log10_cost", log_c), ("log10_gamma", log_g), ("epsilon", eps)):
        if len(pair) != 2 or not float(pair[0]) < float(pair[1]):
            raise ConfigError(f"search_space.{name} must be [lower, upper] with lower < upper")
    search_space = SearchSpace(
        lower=np.array([log_c[0], log_g[0], eps[0]], dtype=float),
        upper=np.array([log_c[1], log_g[1], eps[1]], dtype=float),
    )
    if eps[0] < 0:
        raise ConfigError("search_space.epsilon lower bound must be >= 0")

    pipeline = PipelineConfig(
        optimizer=optimizer,
        search_space=search_space,
        scheme=str(scheme),
        kfold_k=kfold_k,
        candidate_lag_count=candidate_lags,
        mrmr_k=k,
        mrmr_bins=int(raw.get("mrmr_bins", 8)),
        user_lags=user_lags_for_run,
        split=split,
        week_start=parse_week_start(raw.get("week_start", "monday")),
    )

    user_lags = tuple(int(v) for v in raw.get("user_lags", PAPER_USER_LAGS))
    compare_seeds = tuple(int(s) for s in raw.get("compare_seeds", (1, 2, 3)))
    jobs = int(raw.get("jobs", 1))
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")

    return RunConfig(
        load_csv=str(raw["load_csv"]),
        holiday_file=str(raw["holiday_file"]) if raw.get("holiday_file") else None,
        output_dir=str(raw.get("output_dir", "out")),
        pipeline=pipeline,
        mrmr_k=k,
        user_lags=user_lags,
        compare_seeds=compare_seeds,
        jobs=jobs,
    )


def _load_inputs(cfg: RunConfig):
    return load_series(cfg.load_csv, cfg.holiday_file)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_select(cfg: RunConfig) -> int:
    series = _load_inputs(cfg)
    candidates = build_lag_matrix(
        series,
        range(1, cfg.pipeline.candidate_lag_count + 1),
        series.holidays,
        cfg.pipeline.week_start,
    )
    train, _ = split_train_test(candidates, cfg.pipeline.split)
    result = select_lags(train, cfg.mrmr_k, cfg.pipeline.mrmr_bins)
    names = [f"lag_{lag}" for lag in train.lag_set]
    report = mrmr.format_selection_report(result, names)
    out = _out_dir(cfg) / "selection_report.txt"
    out.write_text(report, encoding="utf-8")
    print(f"wrote {out}")
    selected = ", ".join(names[i] for i in result.selected_indices)
    print(f"selected ({cfg.mrmr_k}): {selected}")
    return 0


def cmd_run(cfg: RunConfig, plot: bool = False) -> int:
    series = _load_inputs(cfg)
    report = run_pipeline(series, series.holidays, cfg.pipeline)
    out = _out_dir(cfg)
    (out / "report.json").write_text(report_to_json_text(report), encoding="utf-8")
    (out / "forecast.csv").write_text(report_to_csv_text(report), encoding="utf-8")
    (out / "fitness_history.csv").write_text(
        fitness_history_csv_text(report), encoding="utf-8"
    )
    if plot:
        (out / "forecast.svg").write_text(forecast_svg(report.per_day), encoding="utf-8")
    if report.mape_percent is not None:
        print(f"MAPE: {report.mape_percent:.4f}%")
    print(f"selected lags: {list(report.selected_lags)}")
    print(f"wrote {out / 'report.json'}")
    return 0


def _compare_run(payload):
    series, pipeline, algorithm, mode, user_lags, seed = payload
    config = replace(
        pipeline,
        optimizer=replace(pipeline.optimizer, algorithm=algorithm, seed=seed),
        user_lags=user_lags if mode == "user" else None,
    )
    try:
        report = run_pipeline(series, series.holidays, config)
        return algorithm, mode, seed, report.mape_percent, None
    except PeakcastError as exc:
        return algorithm, mode, seed, None, str(exc)


def cmd_compare(cfg: RunConfig) -> int:
    series = _load_inputs(cfg)
    tasks = [
        (series, cfg.pipeline, algorithm, mode, cfg.user_lags, seed)
        for algorithm, mode in COMPARE_CELLS
        for seed in cfg.compare_seeds
    ]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_compare_run, tasks))
    else:
        results = [_compare_run(t) for t in tasks]

    by_cell = {cell: {} for cell in COMPARE_CELLS}
    errors = []
    for algorithm, mode, seed, score, error in results:
        by_cell[(algorithm, mode)][seed] = score
        if error is not None:
            errors.append(f"{algorithm}+{mode} seed {seed}: {error}")

    lines = [
        "Daily peak-load forecast MAPE (%) by optimizer kernel and lag selection",
        "method\tseeds\tmedian\tper-seed",
    ]
    for algorithm, mode in COMPARE_CELLS:
        label = f"{algorithm.upper()}+{'MRMR' if mode == 'mrmr' else 'user'}"
        scores = [by_cell[(algorithm, mode)][s] for s in cfg.compare_seeds]
        ok = [s for s in scores if s is not None]
        median = f"{statistics.median(ok):.4f}" if ok else "failed"
        per_seed = " ".join("err" if s is None else f"{s:.4f}" for s in scores)
        seeds = ",".join(str(s) for s in cfg.compare_seeds)
        lines.append(f"{label}\t{seeds}\t{median}\t{per_seed}")
    if errors:
        lines.append("")
        lines.extend(f"# {e}" for e in errors)
    table = "\n".join(lines) + "\n"

    out = _out_dir(cfg) / "comparison.txt"
    out.write_text(table, encoding="utf-8")
    print(table, end="")
    print(f"wrote {out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peakcast",
        description="Daily peak-load forecasting with SVR tuned by symbiotic organism search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument("--output-dir", help="override config output_dir")
        p.add_argument("--mrmr-k", type=int, help="select k lags with MRMR (overrides mode)")
        p.add_argument(
            "--lags", help="comma-separated user lag list (overrides selection mode)"
        )

    p_select = sub.add_parser("select", help="rank candidate lags with MRMR")
    add_common(p_select)

    p_run = sub.add_parser("run", help="run the full forecasting pipeline")
    add_common(p_run)
    p_run.add_argument("--seed", type=int, help="override optimizer seed")
    p_run.add_argument("--optimizer", choices=("sos", "pso"), help="tuning kernel")
    p_run.add_argument("--plot", action="store_true", help="also write forecast.svg")

    p_cmp = sub.add_parser(
        "compare", help="run the {sos,pso} x {mrmr,user-lags} ablation matrix"
    )
    add_common(p_cmp)
    p_cmp.add_argument("--seeds", help="comma-separated seed list")
    p_cmp.add_argument("--jobs", type=int, help="parallel pipeline runs")
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    pipeline = cfg.pipeline
    if args.output_dir:
        cfg = replace(cfg, output_dir=args.output_dir)
    if getattr(args, "seed", None) is not None:
        pipeline = replace(pipeline, optimizer=replace(pipeline.optimizer, seed=args.seed))
    if getattr(args, "optimizer", None):
        pipeline = replace(
            pipeline, optimizer=replace(pipeline.optimizer, algorithm=args.optimizer)
        )
    if args.lags:
        try:
            lags = tuple(int(v) for v in args.lags.split(","))
        except ValueError:
            raise ConfigError(f"--lags must be comma-separated integers, got {args.lags!r}")
        if not lags:
            raise ConfigError("--lags must name at least one lag")
        pipeline = replace(pipeline, user_lags=lags)
    elif args.mrmr_k is not None:
        if args.mrmr_k < 1:
            raise ConfigError(f"--mrmr-k must be >= 1, got {args.mrmr_k}")
        cfg = replace(cfg, mrmr_k=args.mrmr_k)
        pipeline = replace(pipeline, mrmr_k=args.mrmr_k, user_lags=None)
    if getattr(args, "seeds", None):
        try:
            seeds = tuple(int(v) for v in args.seeds.split(","))
        except ValueError:
            raise ConfigError(f"--seeds must be comma-separated integers, got {args.seeds!r}")
        cfg = replace(cfg, compare_seeds=seeds)
    if getattr(args, "jobs", None) is not None:
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
        cfg = replace(cfg, jobs=args.jobs)
    return replace(cfg, pipeline=pipeline)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "select":
            return cmd_select(cfg)
        if args.command == "run":
            return cmd_run(cfg, plot=args.plot)
        return cmd_compare(cfg)
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, ConfigError):
            return 2
        if isinstance(exc.cause, DataError):
            return 3
        if isinstance(exc.cause, NumericError):
            return 4
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
