"""Deterministic file outputs: CSV tables, static SVG plots, JSON summaries.

Every file is written to a temporary sibling and renamed into place, so a
reader never sees a half-written artifact.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Iterable, Sequence

import numpy as np

__all__ = ["fmt", "csv_text", "write_atomic", "json_text", "line_plot", "heatmap"]


def fmt(v) -> str:
    """Nine significant digits, point decimal; ints and strings verbatim."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if v == 0.0:
        return "0"
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    out = [",".join(header)]
    for r in rows:
        out.append(",".join(fmt(v) for v in r))
    return "\n".join(out) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return float(fmt(v)) if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def json_text(obj) -> str:
    """Sorted-key JSON; floats rounded to 9 significant digits, non-finite -> null."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------------- SVG

_W, _H = 640, 420
_L, _R, _T, _B = 70, 20, 30, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b")


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi):
    pw, ph = _W - _L - _R, _H - _T - _B
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="18" text-anchor="middle" font-size="14">{_esc(title)}</text>',
        f'<rect x="{_L}" y="{_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{_L + pw / 2:.1f}" y="{_H - 10}" text-anchor="middle" font-size="12">{_esc(xlabel)}</text>',
        f'<text x="15" y="{_T + ph / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {_T + ph / 2:.1f})">{_esc(ylabel)}</text>',
    ]
    for v in _ticks(xlo, xhi):
        px = _L + (v - xlo) / (xhi - xlo or 1) * pw
        parts.append(f'<text x="{px:.1f}" y="{_T + ph + 16}" text-anchor="middle" font-size="10">{v:.4g}</text>')
    for v in _ticks(ylo, yhi):
        py = _T + ph - (v - ylo) / (yhi - ylo or 1) * ph
        parts.append(f'<text x="{_L - 5}" y="{py + 3:.1f}" text-anchor="end" font-size="10">{v:.4g}</text>')
    return parts, pw, ph


def _range(vals):
    vals = [v for v in vals if math.isfinite(v)]
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def line_plot(series, title: str, xlabel: str, ylabel: str) -> str:
    """series: list of (label, xs, ys); non-finite points break the polyline."""
    xs_all = [float(x) for _, xs, _ in series for x in xs]
    ys_all = [float(y) for _, _, ys in series for y in ys]
    xlo, xhi = _range(xs_all)
    ylo, yhi = _range(ys_all)
    parts, pw, ph = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        runs, cur = [], []
        for x, y in zip(xs, ys):
            x, y = float(x), float(y)
            if math.isfinite(x) and math.isfinite(y):
                px = _L + (x - xlo) / (xhi - xlo) * pw
                py = _T + ph - (y - ylo) / (yhi - ylo) * ph
                cur.append(f"{px:.2f},{py:.2f}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for r in runs:
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(r)}"/>')
        ly = _T + 14 + 14 * i
        parts.append(f'<line x1="{_L + pw - 120}" y1="{ly - 4}" x2="{_L + pw - 100}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_L + pw - 95}" y="{ly}" font-size="11">{_esc(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heatmap(xs, ys, Z, title: str, xlabel: str, ylabel: str, zlabel: str, vmin=None, vmax=None) -> str:
    """Z[i, j] at (xs[j], ys[i]); blue (low) to red (high), grey for missing."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    Z = np.asarray(Z, dtype=float)
    fin = Z[np.isfinite(Z)]
    lo = float(fin.min()) if vmin is None and fin.size else (vmin if vmin is not None else 0.0)
    hi = float(fin.max()) if vmax is None and fin.size else (vmax if vmax is not None else 1.0)
    if hi == lo:
        hi = lo + 1.0
    parts, pw, ph = _frame(f"{title} ({zlabel}: {lo:.3g} .. {hi:.3g})", xlabel, ylabel, xs[0], xs[-1], ys[0], ys[-1])
    cw, ch = pw / len(xs), ph / len(ys)
    for i in range(len(ys)):
        for j in range(len(xs)):
            z = Z[i, j]
            if math.isfinite(z):
                t = min(max((z - lo) / (hi - lo), 0.0), 1.0)
                color = f"rgb({int(round(255 * t))},{int(round(80 + 60 * (1 - abs(2 * t - 1))))},{int(round(255 * (1 - t)))})"
            else:
                color = "rgb(180,180,180)"
            parts.append(
                f'<rect x="{_L + j * cw:.2f}" y="{_T + ph - (i + 1) * ch:.2f}" '
                f'width="{cw + 0.05:.2f}" height="{ch + 0.05:.2f}" fill="{color}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
