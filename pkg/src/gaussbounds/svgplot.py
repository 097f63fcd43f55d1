"""Minimal deterministic SVG line plots (axes, ticks, legend, log scales).

Byte-identical output for identical input; no styling knobs beyond scales.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 20, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, log: bool):
    if log:
        lo_e = math.floor(math.log10(lo))
        hi_e = math.ceil(math.log10(hi))
        return [10.0**e for e in range(lo_e, hi_e + 1)]
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10.0 ** math.floor(math.log10(span / 4))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    val = first
    while val <= hi + 1e-12 * span:
        out.append(val)
        val += step
    return out


class _Scale:
    def __init__(self, lo, hi, out_lo, out_hi, log=False):
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi <= lo:
            hi = lo + 1.0
        self.lo, self.hi, self.out_lo, self.out_hi, self.log = lo, hi, out_lo, out_hi, log

    def __call__(self, v):
        if self.log:
            v = math.log10(v)
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.out_lo + frac * (self.out_hi - self.out_lo)


def render_lines(
    x_values,
    series: dict,
    x_label: str,
    y_label: str,
    log_y: bool = True,
    log_x: bool = False,
) -> str:
    """SVG document for named series sharing one x grid; gaps (None/NaN) are skipped."""
    pts_all = [
        (x, y)
        for ys in series.values()
        for x, y in zip(x_values, ys)
        if y is not None and not (isinstance(y, float) and math.isnan(y)) and (not log_y or y > 0)
    ]
    if not pts_all:
        raise ValueError("nothing to plot: all series are empty")
    xs = [p[0] for p in pts_all]
    ys = [p[1] for p in pts_all]
    x_scale = _Scale(min(xs), max(xs), MARGIN_L, WIDTH - MARGIN_R, log=log_x)
    y_scale = _Scale(min(ys), max(ys), HEIGHT - MARGIN_B, MARGIN_T, log=log_y)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{WIDTH - MARGIN_L - MARGIN_R}" '
        f'height="{HEIGHT - MARGIN_T - MARGIN_B}" fill="none" stroke="black"/>',
    ]
    for tick in _ticks(min(xs), max(xs), log_x):
        px = x_scale(tick)
        if MARGIN_L - 1 <= px <= WIDTH - MARGIN_R + 1:
            parts.append(
                f'<line x1="{px:.2f}" y1="{HEIGHT - MARGIN_B}" x2="{px:.2f}" '
                f'y2="{HEIGHT - MARGIN_B + 5}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{px:.2f}" y="{HEIGHT - MARGIN_B + 18}" font-size="11" '
                f'text-anchor="middle">{_fmt(tick)}</text>'
            )
    for tick in _ticks(min(ys), max(ys), log_y):
        py = y_scale(tick)
        if MARGIN_T - 1 <= py <= HEIGHT - MARGIN_B + 1:
            parts.append(
                f'<line x1="{MARGIN_L - 5}" y1="{py:.2f}" x2="{MARGIN_L}" y2="{py:.2f}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{MARGIN_L - 8}" y="{py + 4:.2f}" font-size="11" '
                f'text-anchor="end">{_fmt(tick)}</text>'
            )
    parts.append(
        f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2:.1f}" y="{HEIGHT - 10}" font-size="13" '
        f'text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{(MARGIN_T + HEIGHT - MARGIN_B) / 2:.1f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 {(MARGIN_T + HEIGHT - MARGIN_B) / 2:.1f})">'
        f"{y_label}</text>"
    )
    for idx, (name, ys_ser) in enumerate(series.items()):
        color = PALETTE[idx % len(PALETTE)]
        coords = []
        for x, y in zip(x_values, ys_ser):
            ok = y is not None and not (isinstance(y, float) and math.isnan(y)) and (not log_y or y > 0)
            if ok:
                coords.append(f"{x_scale(x):.2f},{y_scale(y):.2f}")
            elif coords:
                parts.append(
                    f'<polyline points="{" ".join(coords)}" fill="none" stroke="{color}" stroke-width="1.5"/>'
                )
                coords = []
        if coords:
            parts.append(
                f'<polyline points="{" ".join(coords)}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        ly = MARGIN_T + 16 + 16 * idx
        parts.append(
            f'<line x1="{WIDTH - MARGIN_R - 120}" y1="{ly}" x2="{WIDTH - MARGIN_R - 95}" '
            f'y2="{ly}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN_R - 90}" y="{ly + 4}" font-size="12">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
