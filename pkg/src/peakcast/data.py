"""Daily peak-load ingestion, calendar encoding, lag matrices and scaling.

File formats:

* load CSV: header ``date,peak_load``; ISO-8601 dates; decimal MW; UTF-8;
  LF or CRLF.
* holiday file: one ISO-8601 date per line; ``#`` starts a comment line.
* matrix export (debug): header row of column names, comma-separated
  decimals, targets in the final column.
"""

from __future__ import annotations

import datetime as dt
import io
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from .errors import DataError, DimensionMismatchError, NumericError

CALENDAR_WIDTH = 16  # 12 month bits + 3 day-type bits + 1 holiday bit

WEEKDAY_NAMES = (
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
)


@dataclass(frozen=True)
class DailySeries:
    """Date-indexed daily peak loads (strictly increasing dates, loads > 0)."""

    dates: tuple
    loads: np.ndarray
    holidays: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "loads", np.asarray(self.loads, dtype=float))
        object.__setattr__(self, "holidays", frozenset(self.holidays))
        if len(self.dates) != self.loads.size:
            raise DataError("dates and loads have different lengths")
        if len(self.dates) == 0:
            raise DataError("series is empty")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise DataError(f"dates not strictly increasing at {b}")
        if not np.isfinite(self.loads).all() or not (self.loads > 0).all():
            raise DataError("peak loads must be finite and > 0")

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def records(self) -> list:
        return list(zip(self.dates, self.loads))

    @property
    def first_date(self) -> dt.date:
        return self.dates[0]

    @property
    def last_date(self) -> dt.date:
        return self.dates[-1]

    @property
    def gap_count(self) -> int:
        """Number of missing calendar days inside the covered span."""
        span = (self.last_date - self.first_date).days + 1
        return span - len(self.dates)

    def as_mapping(self) -> dict:
        return dict(zip(self.dates, self.loads))


def _open_text(source):
    if hasattr(source, "read"):
        return source, getattr(source, "name", "<stream>"), False
    try:
        return open(source, "r", encoding="utf-8", newline=""), str(source), True
    except OSError as exc:
        raise DataError(f"cannot open file: {exc}", path=str(source))


def _parse_date(text: str, path: str, line_no: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise DataError(f"unparseable date {text.strip()!r}", path=path, line=line_no)


def load_series(csv_source, holiday_source=None) -> DailySeries:
    """Parse, sort and validate a load CSV plus an optional holiday file.

    Holidays outside the series date range produce a warning, not an error;
    missing dates inside the range are allowed and visible via ``gap_count``.
    """
    fh, path, should_close = _open_text(csv_source)
    try:
        lines = fh.read().splitlines()
    finally:
        if should_close:
            fh.close()
    if not lines:
        raise DataError("empty load file", path=path)
    header = lines[0].strip().lower().replace(" ", "")
    if header != "date,peak_load":
        raise DataError(
            f"expected header 'date,peak_load', got {lines[0]!r}", path=path, line=1
        )

    seen = {}
    for line_no, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 2:
            raise DataError(f"expected 2 fields, got {len(parts)}", path=path, line=line_no)
        day = _parse_date(parts[0], path, line_no)
        try:
            load = float(parts[1])
        except ValueError:
            raise DataError(
                f"unparseable load {parts[1].strip()!r}", path=path, line=line_no
            )
        if day in seen:
            raise DataError(f"duplicate date {day.isoformat()}", path=path, line=line_no)
        if not np.isfinite(load) or load <= 0:
            raise DataError(
                f"peak load must be > 0, got {parts[1].strip()} on {day.isoformat()}",
                path=path,
                line=line_no,
            )
        seen[day] = load

    if not seen:
        raise DataError("load file has no data rows", path=path)
    days = sorted(seen)
    loads = np.array([seen[d] for d in days])

    holidays = set()
    if holiday_source is not None:
        holidays = read_holidays(holiday_source)
        outside = {d for d in holidays if d < days[0] or d > days[-1]}
        if outside:
            sample = ", ".join(d.isoformat() for d in sorted(outside)[:3])
            warnings.warn(
                f"{len(outside)} holiday(s) outside the series range (e.g. {sample})",
                stacklevel=2,
            )
    return DailySeries(dates=tuple(days), loads=loads, holidays=frozenset(holidays))


def read_holidays(source) -> set:
    fh, path, should_close = _open_text(source)
    try:
        lines = fh.read().splitlines()
    finally:
        if should_close:
            fh.close()
    holidays = set()
    for line_no, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        holidays.add(_parse_date(text, path, line_no))
    return holidays


def write_series(series: DailySeries, target) -> None:
    """Canonical CSV form of a series (inverse of load_series up to formatting)."""
    fh, _, should_close = (
        (target, None, False) if hasattr(target, "write")
        else (open(target, "w", encoding="utf-8"), None, True)
    )
    try:
        fh.write("date,peak_load\n")
        for day, load in series.records:
            fh.write(f"{day.isoformat()},{float(load)!r}\n")
    finally:
        if should_close:
            fh.close()


def write_holidays(holidays: Iterable[dt.date], target) -> None:
    fh, _, should_close = (
        (target, None, False) if hasattr(target, "write")
        else (open(target, "w", encoding="utf-8"), None, True)
    )
    try:
        for day in sorted(holidays):
            fh.write(day.isoformat() + "\n")
    finally:
        if should_close:
            fh.close()


@dataclass(frozen=True)
class CalendarEncoding:
    """Binary calendar features: month one-hot, three-way day type, holiday."""

    month_onehot: np.ndarray  # 12 bits, exactly one set
    day_type: np.ndarray  # (first-day-of-week, mid-week, weekend), one set
    holiday_flag: int

    def as_vector(self) -> np.ndarray:
        return np.concatenate(
            [self.month_onehot, self.day_type, [float(self.holiday_flag)]]
        )


def parse_week_start(name) -> int:
    if isinstance(name, int):
        if 0 <= name <= 6:
            return name
        raise DataError(f"week start must be in 0..6, got {name}")
    try:
        return WEEKDAY_NAMES.index(str(name).strip().lower())
    except ValueError:
        raise DataError(f"unknown weekday name {name!r}")


def encode_calendar(day: dt.date, holidays, week_start: int = 0) -> CalendarEncoding:
    """Binary encoding of one date.

    Day type: the configured first day of the week wins, then Saturday and
    Sunday count as weekend, every other day is a mid-week weekday.
    """
    month = np.zeros(12)
    month[day.month - 1] = 1.0
    day_type = np.zeros(3)
    if day.weekday() == week_start:
        day_type[0] = 1.0
    elif day.weekday() >= 5:
        day_type[2] = 1.0
    else:
        day_type[1] = 1.0
    return CalendarEncoding(
        month_onehot=month,
        day_type=day_type,
        holiday_flag=1 if day in holidays else 0,
    )


@dataclass(frozen=True)
class NormalizationState:
    """Min-max scaling fitted on training rows: lag columns and target to [0, 1].

    Binary calendar columns pass through untouched; values outside the fitted
    range map outside [0, 1] (affine extension, no clipping).
    """

    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float

    @property
    def lag_count(self) -> int:
        return self.feature_min.size

    def apply_features(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        one_dim = rows.ndim == 1
        rows = np.atleast_2d(rows).copy()
        n = self.lag_count
        if rows.shape[1] < n:
            raise DimensionMismatchError(
                f"rows have {rows.shape[1]} columns, scaling expects >= {n}"
            )
        rows[:, :n] = (rows[:, :n] - self.feature_min) / (
            self.feature_max - self.feature_min
        )
        return rows[0] if one_dim else rows

    def apply_target(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return (values - self.target_min) / (self.target_max - self.target_min)

    def invert_target(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return values * (self.target_max - self.target_min) + self.target_min


@dataclass(frozen=True)
class FeatureMatrix:
    """Supervised rows of (lag loads, 16 calendar bits) with aligned targets."""

    rows: np.ndarray
    targets: np.ndarray
    row_dates: tuple
    lag_set: tuple
    normalization: Optional[NormalizationState] = None
    dropped_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "row_dates", tuple(self.row_dates))
        object.__setattr__(self, "lag_set", tuple(self.lag_set))
        if self.rows.shape[0] != self.targets.size or self.rows.shape[0] != len(
            self.row_dates
        ):
            raise DataError("rows, targets and row_dates must align")
        if self.rows.shape[0] and self.rows.shape[1] != len(self.lag_set) + CALENDAR_WIDTH:
            raise DataError(
                f"row width {self.rows.shape[1]} != {len(self.lag_set)} lags + {CALENDAR_WIDTH}"
            )

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def lag_count(self) -> int:
        return len(self.lag_set)

    def column_names(self) -> list:
        names = [f"lag_{k}" for k in self.lag_set]
        names += [f"month_{m}" for m in range(1, 13)]
        names += ["day_first", "day_mid", "day_weekend", "holiday"]
        return names

    def subset(self, indices) -> "FeatureMatrix":
        indices = np.asarray(indices, dtype=int)
        return FeatureMatrix(
            rows=self.rows[indices].copy(),
            targets=self.targets[indices].copy(),
            row_dates=tuple(self.row_dates[i] for i in indices),
            lag_set=self.lag_set,
            normalization=self.normalization,
            dropped_count=self.dropped_count,
        )

    def export_text(self) -> str:
        lines = [",".join(self.column_names() + ["target"])]
        for row, target in zip(self.rows, self.targets):
            lines.append(",".join([repr(float(v)) for v in row] + [repr(float(target))]))
        return "\n".join(lines) + "\n"


def build_lag_matrix(
    series: DailySeries, lag_set, holidays=None, week_start: int = 0
) -> FeatureMatrix:
    """One row per date whose every lag date exists in the series.

    Rows with any lag date missing (gaps or before the series start) are
    dropped and counted in ``dropped_count``.
    """
    lag_set = tuple(int(k) for k in lag_set)
    if not lag_set:
        raise DataError("lag_set is empty")
    if any(k < 1 for k in lag_set):
        raise DataError(f"lags must be >= 1, got {min(lag_set)}")
    if len(set(lag_set)) != len(lag_set):
        raise DataError("lag_set contains duplicates")
    if max(lag_set) >= len(series):
        raise DataError(
            f"max lag {max(lag_set)} is out of range for a series of {len(series)} records"
        )
    if holidays is None:
        holidays = series.holidays

    by_date = series.as_mapping()
    rows, targets, row_dates = [], [], []
    dropped = 0
    for day, load in series.records:
        lag_days = [day - dt.timedelta(days=k) for k in lag_set]
        if all(d in by_date for d in lag_days):
            calendar = encode_calendar(day, holidays, week_start).as_vector()
            rows.append(np.concatenate([[by_date[d] for d in lag_days], calendar]))
            targets.append(load)
            row_dates.append(day)
        else:
            dropped += 1
    return FeatureMatrix(
        rows=np.array(rows) if rows else np.empty((0, len(lag_set) + CALENDAR_WIDTH)),
        targets=np.array(targets),
        row_dates=tuple(row_dates),
        lag_set=lag_set,
        dropped_count=dropped,
    )


@dataclass(frozen=True)
class SplitSpec:
    """Train/test filter by target date; defaults follow the winter-months
    two-year training split with the following January as the test month."""

    train_years: tuple = (1997, 1998)
    train_months: tuple = (1, 2, 3, 10, 11, 12)
    test_year: int = 1999
    test_month: int = 1


def split_train_test(
    matrix: FeatureMatrix, spec: SplitSpec = SplitSpec()
) -> tuple[FeatureMatrix, FeatureMatrix]:
    train_idx = [
        i
        for i, d in enumerate(matrix.row_dates)
        if d.year in spec.train_years and d.month in spec.train_months
    ]
    test_idx = [
        i
        for i, d in enumerate(matrix.row_dates)
        if d.year == spec.test_year and d.month == spec.test_month
    ]
    if not train_idx:
        raise DataError("train split is empty for the configured date ranges")
    if not test_idx:
        raise DataError("test split is empty for the configured date ranges")
    return matrix.subset(train_idx), matrix.subset(test_idx)


def fit_normalization(train: FeatureMatrix) -> NormalizationState:
    """Min-max state from training rows only; constant lag columns are an error."""
    if len(train) == 0:
        raise DataError("cannot fit normalization on an empty matrix")
    n = train.lag_count
    fmin = train.rows[:, :n].min(axis=0)
    fmax = train.rows[:, :n].max(axis=0)
    if (fmax <= fmin).any():
        col = int(np.argmax(fmax <= fmin))
        raise NumericError(f"lag column {train.lag_set[col]} is constant in training data")
    tmin = float(train.targets.min())
    tmax = float(train.targets.max())
    if tmax <= tmin:
        raise NumericError("target is constant in training data")
    return NormalizationState(
        feature_min=fmin, feature_max=fmax, target_min=tmin, target_max=tmax
    )


def apply_normalization(matrix: FeatureMatrix, state: NormalizationState) -> FeatureMatrix:
    return replace(
        matrix,
        rows=state.apply_features(matrix.rows),
        targets=state.apply_target(matrix.targets),
        normalization=state,
    )
