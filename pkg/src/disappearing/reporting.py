"""CSV tables, JSON reports and a dependency-free SVG energy plot."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .quadrature import EnergyTrace

SCHEMA_VERSION = 1


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def write_trace_csv(path, trace: EnergyTrace, extra: dict | None = None):
    header = ["t", "energy", "flux"]
    cols = [trace.times, trace.energy, trace.flux]
    for name, col in (extra or {}).items():
        header.append(name)
        cols.append(np.asarray(col))
    write_csv(path, header, zip(*cols))


def emit_svg(trace: EnergyTrace, path, title: str = "energy", width: int = 640, height: int = 400):
    """Plot log10(energy) against t; zero energies are drawn on the plot floor.

    The fitted slope of ln(energy) over the positive samples is annotated.
    """
    t = np.asarray(trace.times, dtype=float)
    e = np.asarray(trace.energy, dtype=float)
    if t.size < 2:
        raise ParameterError("need at least two trace samples to plot")
    pos = e > 0
    if not np.any(pos):
        raise ParameterError("trace has no positive energy to plot")
    emax = float(np.max(e[pos]))
    floor = max(float(np.min(e[pos])), emax * 1e-30)
    if np.any(~pos):
        floor = floor / 10.0
    y = np.log10(np.where(pos, e, floor).clip(min=floor))
    ylo, yhi = math.floor(float(np.min(y))), math.ceil(float(np.max(y)))
    if yhi == ylo:
        yhi = ylo + 1
    tlo, thi = float(t[0]), float(t[-1])
    if thi == tlo:
        thi = tlo + 1.0
    m = 60

    def sx(v):
        return m + (v - tlo) / (thi - tlo) * (width - 2 * m)

    def sy(v):
        return height - m - (v - ylo) / (yhi - ylo) * (height - 2 * m)

    slope = None
    if np.count_nonzero(pos) >= 2:
        slope = float(np.polyfit(t[pos], np.log(e[pos]), 1)[0])

    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, y))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{title}</text>',
        f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" stroke="black"/>',
    ]
    for k in range(ylo, yhi + 1):
        parts.append(f'<text x="{m - 6}" y="{sy(k) + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">1e{k}</text>')
        parts.append(f'<line x1="{m}" y1="{sy(k):.2f}" x2="{width - m}" y2="{sy(k):.2f}" '
                     f'stroke="#ddd"/>')
    for v in np.linspace(tlo, thi, 6):
        parts.append(f'<text x="{sx(v):.2f}" y="{height - m + 16}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{v:.3g}</text>')
    parts.append(f'<text x="{width / 2:.0f}" y="{height - 14}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">t</text>')
    parts.append(f'<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{pts}"/>')
    if slope is not None:
        parts.append(f'<text x="{width - m}" y="{m - 8}" text-anchor="end" font-family="sans-serif" '
                     f'font-size="12">fitted d ln(energy)/dt = {slope:.6g}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
    return slope
