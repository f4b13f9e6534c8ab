import datetime as dt
import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from peakcast.data import SplitSpec, write_holidays, write_series
from peakcast.synthetic import synthetic_series


@pytest.fixture(scope="session")
def eunite_like_series():
    """Two years of history plus one January, gap-free, with holidays."""
    return synthetic_series()


@pytest.fixture(scope="session")
def eunite_like_files(tmp_path_factory, eunite_like_series):
    """The same series written in the on-disk input formats."""
    root = tmp_path_factory.mktemp("fixture")
    loads = root / "loads.csv"
    holidays = root / "holidays.txt"
    write_series(eunite_like_series, loads)
    write_holidays(eunite_like_series.holidays, holidays)
    return loads, holidays


@pytest.fixture(scope="session")
def small_series():
    """Eight months of 1997: enough for a quick train/test split."""
    return synthetic_series(
        start=dt.date(1997, 1, 1), end=dt.date(1997, 8, 31), seed=7
    )


SMALL_SPLIT = SplitSpec(
    train_years=(1997,), train_months=(2, 3, 4, 5, 6), test_year=1997, test_month=7
)


@pytest.fixture(scope="session")
def small_split():
    return SMALL_SPLIT


def write_cli_config(path: Path, loads: Path, holidays: Path, **overrides) -> Path:
    """A CLI config sized for fast tests; overrides merge on top."""
    config = {
        "load_csv": str(loads),
        "holiday_file": str(holidays),
        "output_dir": str(path.parent / "out"),
        "lag_selection": {"mode": "mrmr", "k": 4},
        "candidate_lags": 10,
        "optimizer": {
            "algorithm": "sos",
            "population_size": 6,
            "max_iterations": 4,
            "seed": 11,
        },
        "split": {
            "train_years": [1997],
            "train_months": [2, 3, 4, 5, 6],
            "test_year": 1997,
            "test_month": 7,
        },
        "user_lags": [1, 2, 7],
        "compare_seeds": [11, 12],
    }
    for key, value in overrides.items():
        if value is None:
            config.pop(key, None)
        else:
            config[key] = value
    path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def small_files(tmp_path, small_series):
    loads = tmp_path / "loads.csv"
    holidays = tmp_path / "holidays.txt"
    write_series(small_series, loads)
    in_range = {
        d
        for d in small_series.holidays
        if small_series.first_date <= d <= small_series.last_date
    }
    write_holidays(in_range, holidays)
    return loads, holidays
