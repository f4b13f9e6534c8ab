"""Deterministic SVG line chart of actual vs. predicted daily peaks.

Predicted values are drawn dashed, actuals solid. Pure string assembly so
identical reports produce byte-identical images.
"""

from __future__ import annotations

import math

_WIDTH, _HEIGHT = 900, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 30, 40, 60


def _nice_ticks(lo: float, hi: float, target: int = 6):
    span = hi - lo
    if span <= 0:
        span = max(abs(hi), 1.0)
        lo, hi = lo - span / 2, hi + span / 2
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * step:
        ticks.append(value)
        value += step
    return ticks


def forecast_svg(per_day, title: str = "Daily peak load: actual vs. predicted") -> str:
    """per_day: iterable of (date, actual-or-None, predicted)."""
    per_day = list(per_day)
    if not per_day:
        raise ValueError("nothing to plot")
    dates = [d for d, _, _ in per_day]
    actuals = [a for _, a, _ in per_day if a is not None]
    predictions = [p for _, _, p in per_day]
    values = actuals + predictions
    lo, hi = min(values), max(values)
    pad = 0.05 * (hi - lo if hi > lo else max(abs(hi), 1.0))
    lo, hi = lo - pad, hi + pad

    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM
    n = len(per_day)

    def x_at(i: int) -> float:
        return _LEFT + (plot_w * i / (n - 1) if n > 1 else plot_w / 2)

    def y_at(v: float) -> float:
        return _TOP + plot_h * (hi - v) / (hi - lo)

    def path(points) -> str:
        return " ".join(f"{x:.2f},{y:.2f}" for x, y in points)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]

    for tick in _nice_ticks(lo, hi):
        y = y_at(tick)
        parts.append(
            f'<line x1="{_LEFT}" y1="{y:.2f}" x2="{_WIDTH - _RIGHT}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:g}</text>'
        )

    label_step = max(1, n // 8)
    for i in range(0, n, label_step):
        x = x_at(i)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_HEIGHT - _BOTTOM}" x2="{x:.2f}" '
            f'y2="{_HEIGHT - _BOTTOM + 5}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_HEIGHT - _BOTTOM + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{dates[i].isoformat()}</text>'
        )

    parts.append(
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )

    # actual: solid, split across gaps
    segment = []
    segments = []
    for i, (_, actual, _) in enumerate(per_day):
        if actual is None:
            if segment:
                segments.append(segment)
            segment = []
        else:
            segment.append((x_at(i), y_at(actual)))
    if segment:
        segments.append(segment)
    for seg in segments:
        if len(seg) == 1:
            x, y = seg[0]
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="#1f6fb4"/>')
        else:
            parts.append(
                f'<polyline points="{path(seg)}" fill="none" stroke="#1f6fb4" '
                f'stroke-width="1.8"/>'
            )

    pred_points = [(x_at(i), y_at(p)) for i, (_, _, p) in enumerate(per_day)]
    parts.append(
        f'<polyline points="{path(pred_points)}" fill="none" stroke="#c43d3d" '
        f'stroke-width="1.8" stroke-dasharray="6,4"/>'
    )

    legend_x = _WIDTH - _RIGHT - 190
    parts += [
        f'<line x1="{legend_x}" y1="{_TOP + 12}" x2="{legend_x + 34}" y2="{_TOP + 12}" '
        f'stroke="#1f6fb4" stroke-width="1.8"/>',
        f'<text x="{legend_x + 40}" y="{_TOP + 16}" font-family="sans-serif" '
        f'font-size="12">actual</text>',
        f'<line x1="{legend_x}" y1="{_TOP + 30}" x2="{legend_x + 34}" y2="{_TOP + 30}" '
        f'stroke="#c43d3d" stroke-width="1.8" stroke-dasharray="6,4"/>',
        f'<text x="{legend_x + 40}" y="{_TOP + 34}" font-family="sans-serif" '
        f'font-size="12">predicted</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
