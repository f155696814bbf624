"""CSV, SVG and manifest writers. All writes go through a temp file + rename."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from ..analysis import SweepResult
from ..trajectory import Trajectory

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def table_of(data, columns=None):
    """Header and rows for a Trajectory, a SweepResult or ``(header, rows)``."""
    if isinstance(data, Trajectory):
        names = list(columns) if columns else list(data.series)
        header = ["t", *names]
        cols = [data.times] + [data.series[n] for n in names]
        rows = list(zip(*cols))
    elif isinstance(data, SweepResult):
        header = data.columns
        rows = [[*point.values(), metric, value] for point, metric, value in data.rows]
    else:
        header, rows = data
        rows = list(rows)
    return header, rows


def render_csv(data, columns=None) -> str:
    header, rows = table_of(data, columns)
    if not rows:
        raise ValueError("refusing to write an empty table")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(data, path, columns=None):
    """Write a header plus one row per sample; identical input gives identical bytes."""
    return atomic_write(path, render_csv(data, columns))


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def render_svg(curves, title="", xlabel="t", ylabel="population", width=640, height=400) -> str:
    """Minimal SVG 1.1 line plot. ``curves`` is a list of ``(label, x, y)``."""
    if not curves:
        raise ValueError("nothing to plot")
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs = np.concatenate([np.asarray(c[1], float) for c in curves])
    ys = np.concatenate([np.asarray(c[2], float) for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(0.0, float(ys.min())), max(1.0, float(ys.max()))
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2:.1f}" y="{top - 15}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>',
        f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for x in _ticks(x0, x1):
        out.append(f'<line x1="{sx(x):.2f}" y1="{top + ph}" x2="{sx(x):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(x):.2f}" y="{top + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="10">{x:.4g}</text>')
    for y in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(y):.2f}" x2="{left}" y2="{sy(y):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(y) + 3:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="10">{y:.3g}</text>')
    for k, (label, x, y) in enumerate(curves):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 15 + 18 * k
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 35}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 40}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(curves, path, **kwargs):
    return atomic_write(path, render_svg(curves, **kwargs))


def render_manifest(entries: list[tuple[str, object]], volatile: list[tuple[str, object]]) -> str:
    """``key: value`` lines; ``volatile`` (timestamp, wall time) always come last."""
    lines = [f"{k}: {v}" for k, v in entries]
    lines += [f"{k}: {v}" for k, v in volatile]
    return "\n".join(lines) + "\n"
