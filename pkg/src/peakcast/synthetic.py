"""Seeded synthetic daily peak-load series shaped like the winter-peaking
competition data (two years of history plus one January): annual cycle,
weekly profile, holiday dips, AR(1) weather residual and white noise.

Used by the demos and the test suite; real data is user-supplied.
"""

from __future__ import annotations

import datetime as dt

import numpy as np

from .data import DailySeries

# (month, day) pairs observed every year
DEFAULT_HOLIDAYS = (
    (1, 1), (3, 21), (5, 1), (7, 14), (8, 15), (11, 1), (12, 25), (12, 26),
)

# relative weekday profile, Monday..Sunday
_WEEKDAY_PROFILE = np.array([0.20, 0.28, 0.30, 0.26, 0.16, -0.76, -1.04])


def holiday_dates(years) -> set:
    return {dt.date(y, m, d) for y in years for m, d in DEFAULT_HOLIDAYS}


def synthetic_series(
    start: dt.date = dt.date(1997, 1, 1),
    end: dt.date = dt.date(1999, 1, 31),
    seed: int = 2024,
    base_load: float = 750.0,
    annual_amplitude: float = 120.0,
    weekly_scale: float = 55.0,
    holiday_drop: float = 65.0,
    ar_phi: float = 0.75,
    ar_sigma: float = 4.0,
    noise_sigma: float = 2.0,
) -> DailySeries:
    """Generate a gap-free series with holidays attached."""
    rng = np.random.default_rng(seed)
    n = (end - start).days + 1
    days = [start + dt.timedelta(days=i) for i in range(n)]
    holidays = holiday_dates(range(start.year, end.year + 1))

    day_of_year = np.array([d.timetuple().tm_yday for d in days], dtype=float)
    annual = annual_amplitude * np.cos(2.0 * np.pi * (day_of_year - 15.0) / 365.25)
    weekly = weekly_scale * _WEEKDAY_PROFILE[[d.weekday() for d in days]]
    holiday = np.array([-holiday_drop if d in holidays else 0.0 for d in days])

    shocks = rng.normal(0.0, ar_sigma, size=n)
    ar = np.empty(n)
    ar[0] = shocks[0] / np.sqrt(1.0 - ar_phi**2)
    for i in range(1, n):
        ar[i] = ar_phi * ar[i - 1] + shocks[i]
    white = rng.normal(0.0, noise_sigma, size=n)

    loads = base_load + annual + weekly + holiday + ar + white
    return DailySeries(dates=tuple(days), loads=loads, holidays=frozenset(holidays))
