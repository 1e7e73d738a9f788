"""Deterministic file outputs: CSV tables, polyline SVG plots and a run manifest."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass
class Panel:
    """One output table, written as ``<name>.csv`` and optionally ``<name>.svg``.

    ``x`` names the abscissa column and ``y`` the plotted columns (all
    remaining columns when empty).
    """

    name: str
    header: Sequence[str]
    rows: np.ndarray
    x: str | None = None
    y: Sequence[str] = field(default_factory=tuple)
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""


def format_value(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0.0:
        return "0"  # collapse -0.0
    return f"{v:.17g}"


def write_csv(path: Path, header: Sequence[str], rows) -> Path:
    """Comma-separated, header row, 17 significant digits, LF line endings."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.zeros((0, len(header)))
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return path


def _ticks(lo: float, hi: float) -> list[float]:
    if hi <= lo:
        return [lo]
    return list(np.linspace(lo, hi, 5))


def svg_plot(panel: Panel, width: int = 640, height: int = 400) -> str:
    """Line plot of the panel's ``y`` columns against ``x`` as a standalone SVG document."""
    header = list(panel.header)
    rows = np.atleast_2d(np.asarray(panel.rows, dtype=float))
    xcol = header.index(panel.x) if panel.x else 0
    ycols = [header.index(c) for c in panel.y] if panel.y else [i for i in range(len(header)) if i != xcol]
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs = rows[:, xcol] if rows.size else np.zeros(0)
    ys = rows[:, ycols] if rows.size else np.zeros((0, 1))
    finite_x = xs[np.isfinite(xs)]
    finite_y = ys[np.isfinite(ys)]
    x0, x1 = (float(finite_x.min()), float(finite_x.max())) if finite_x.size else (0.0, 1.0)
    y0, y1 = (float(finite_y.min()), float(finite_y.max())) if finite_y.size else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="20" text-anchor="middle" font-size="14">{panel.title or panel.name}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{top + ph + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{panel.xlabel or header[xcol]}</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.1f})">{panel.ylabel}</text>')
    for j, col in enumerate(ycols):
        color = PALETTE[j % len(PALETTE)]
        # break the line at non-finite samples
        segment: list[str] = []
        segments = []
        for xv, yv in zip(xs, rows[:, col] if rows.size else []):
            if np.isfinite(xv) and np.isfinite(yv):
                segment.append(f"{sx(xv):.2f},{sy(yv):.2f}")
            elif segment:
                segments.append(segment)
                segment = []
        if segment:
            segments.append(segment)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        ly = top + 14 + 16 * j
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly}">{header[col]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_outputs(outdir: Path, panels: Sequence[Panel], formats: Sequence[str],
                  summary: dict | None = None, inputs: dict | None = None) -> Path:
    """Write every panel plus ``manifest.json`` listing inputs and file checksums."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    for panel in panels:
        if "csv" in formats:
            files.append(write_csv(outdir / f"{panel.name}.csv", panel.header, panel.rows))
        if "svg" in formats:
            path = outdir / f"{panel.name}.svg"
            path.write_bytes(svg_plot(panel).encode("utf-8"))
            files.append(path)
    if summary is not None and "json" in formats:
        path = outdir / "summary.json"
        path.write_bytes((json.dumps(summary, indent=2, sort_keys=True, default=_jsonable) + "\n").encode())
        files.append(path)
    manifest = {
        "inputs": inputs or {},
        "files": {p.name: sha256(p) for p in files},
    }
    path = outdir / "manifest.json"
    path.write_bytes((json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable) + "\n").encode())
    return path


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")
