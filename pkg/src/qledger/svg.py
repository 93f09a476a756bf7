"""Minimal self-contained SVG line plots.

The CLI's plotting needs are a handful of labelled polylines with axis
ticks, which does not justify a plotting dependency.  Output is plain SVG
1.1 with no external references, parseable by any XML reader.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .qcore import ValidationError

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")

_WIDTH = 720
_HEIGHT = 440
_MARGIN_L = 72
_MARGIN_R = 18
_MARGIN_T = 34
_MARGIN_B = 48


def _ticks(lo: float, hi: float) -> np.ndarray:
    """Around five ticks on a 1-2-5 grid covering [lo, hi]."""
    span = hi - lo
    raw = span / 4.0
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step * (1.0 + 1e-12):
            break
    first = math.ceil(lo / step - 1e-9) * step
    ticks = np.arange(first, hi + 0.5 * step, step)
    # snap near-zero ticks that are pure rounding residue
    ticks[np.abs(ticks) < 1e-12 * span] = 0.0
    return ticks


def _pad_range(lo: float, hi: float) -> tuple[float, float]:
    if hi > lo:
        return lo, hi
    pad = max(abs(lo), 1.0) * 0.5
    return lo - pad, lo + pad


def line_plot(path, x, curves, title: str = "", xlabel: str = "t", ylabel: str = "") -> None:
    """Write labelled polylines over a shared x axis to an SVG file.

    ``curves`` is a sequence of (label, y-array) pairs; all arrays must
    match x in length and be finite.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValidationError("line_plot: x must be a 1-d array with at least 2 points")
    if not np.all(np.isfinite(x)):
        raise ValidationError("line_plot: x values must be finite")
    curves = [(str(label), np.asarray(y, dtype=np.float64)) for label, y in curves]
    if not curves:
        raise ValidationError("line_plot: at least one curve required")
    for label, y in curves:
        if y.shape != x.shape:
            raise ValidationError(f"line_plot: curve {label!r} length does not match x")
        if not np.all(np.isfinite(y)):
            raise ValidationError(f"line_plot: curve {label!r} has non-finite values")

    x_lo, x_hi = _pad_range(float(x.min()), float(x.max()))
    y_all = np.concatenate([y for _, y in curves])
    y_lo, y_hi = _pad_range(float(y_all.min()), float(y_all.max()))
    # breathing room so extremes do not sit on the frame
    y_pad = 0.05 * (y_hi - y_lo)
    y_lo -= y_pad
    y_hi += y_pad

    px_w = _WIDTH - _MARGIN_L - _MARGIN_R
    px_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(v: float) -> float:
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * px_w

    def sy(v: float) -> float:
        return _MARGIN_T + (y_hi - v) / (y_hi - y_lo) * px_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{px_w}" height="{px_h}" '
        'fill="none" stroke="#444444" stroke-width="1"/>',
    ]

    for tick in _ticks(x_lo, x_hi):
        px = sx(float(tick))
        if not (_MARGIN_L - 0.5 <= px <= _WIDTH - _MARGIN_R + 0.5):
            continue
        parts.append(
            f'<line x1="{px:.2f}" y1="{_MARGIN_T}" x2="{px:.2f}" y2="{_MARGIN_T + px_h}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{_HEIGHT - _MARGIN_B + 18}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{format(tick, ".6g")}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        py = sy(float(tick))
        if not (_MARGIN_T - 0.5 <= py <= _HEIGHT - _MARGIN_B + 0.5):
            continue
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{py:.2f}" x2="{_MARGIN_L + px_w}" y2="{py:.2f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{py + 4:.2f}" font-size="12" '
            f'text-anchor="end" font-family="sans-serif">{format(tick, ".6g")}</text>'
        )

    for idx, (label, y) in enumerate(curves):
        color = _COLORS[idx % len(_COLORS)]
        points = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}" for a, b in zip(x, y))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_WIDTH - _MARGIN_R - 6}" y="{_MARGIN_T + 18 + 16 * idx}" font-size="12" '
            f'text-anchor="end" font-family="sans-serif" fill="{color}">{escape(label)}</text>'
        )

    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.0f}" y="{_MARGIN_T - 12}" font-size="14" '
            f'text-anchor="middle" font-family="sans-serif">{escape(title)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + px_w / 2:.0f}" y="{_HEIGHT - 10}" font-size="12" '
        f'text-anchor="middle" font-family="sans-serif">{escape(xlabel)}</text>'
    )
    if ylabel:
        parts.append(
            f'<text x="16" y="{_MARGIN_T + px_h / 2:.0f}" font-size="12" text-anchor="middle" '
            f'font-family="sans-serif" transform="rotate(-90 16 {_MARGIN_T + px_h / 2:.0f})">'
            f"{escape(ylabel)}</text>"
        )
    parts.append("</svg>")

    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
