"""CSV and SVG export of experiment results.

Totals go to ``<recipe>_N_vs_t.{csv,svg}`` with columns ``method, label, t, N``;
profiles to ``<recipe>_profiles.{csv,svg}`` with columns
``method, label, t, site_index, n_i, nu``. Floats are written with ``repr``
so a re-import is bit-identical; steady-state rows carry ``t = inf``.
All files are written to temporaries first and renamed at the end, so a
failure leaves no partial output behind.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .experiment import ExperimentResult

TOTAL_COLUMNS = ("method", "label", "t", "N")
PROFILE_COLUMNS = ("method", "label", "t", "site_index", "n_i", "nu")

LOG_Y = {"fig5", "fig10"}
LOG_XY = {"fig3"}


def _fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def totals_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TOTAL_COLUMNS)
    for s in result.series:
        for t, n in zip(s.times, s.N):
            w.writerow((s.method, s.label, _fmt(t), _fmt(n)))
    return buf.getvalue()


def profiles_csv(result: ExperimentResult) -> str:
    g = result.config.spec.g
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for rec in result.profiles:
        p = rec.profile
        for site, (off, n) in enumerate(zip(p.offsets(), p.n), start=1):
            nu = off / (2.0 * g * p.t) if (g > 0 and math.isfinite(p.t) and p.t > 0) else math.nan
            w.writerow((rec.method, rec.label, _fmt(p.t), site, _fmt(n), _fmt(nu)))
    return buf.getvalue()


def read_csv(path) -> dict[str, list]:
    """Load an exported CSV as columns; numeric columns become float (site_index int)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols: dict[str, list] = {h: [] for h in header}
    for row in body:
        for h, v in zip(header, row):
            if h in ("method", "label"):
                cols[h].append(v)
            elif h == "site_index":
                cols[h].append(int(v))
            else:
                cols[h].append(float(v))
    return cols


def _ticks(lo, hi, log):
    if log:
        a, b = math.floor(lo), math.ceil(hi)
        return [float(k) for k in range(a, b + 1)]
    return list(np.linspace(lo, hi, 5))


def svg_plot(curves, title, xlabel, ylabel, logx=False, logy=False, width=640, height=420) -> str:
    """Minimal self-contained SVG line plot. ``curves`` is ``[(name, x, y), ...]``."""
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]
    pts = []
    for name, x, y in curves:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        if logy:
            keep &= y > 0
        x, y = x[keep], y[keep]
        pts.append((name, np.log10(x) if logx else x, np.log10(y) if logy else y))
    allx = np.concatenate([p[1] for p in pts]) if pts else np.array([0.0, 1.0])
    ally = np.concatenate([p[2] for p in pts]) if pts else np.array([0.0, 1.0])
    if allx.size == 0:
        allx = np.array([0.0, 1.0])
        ally = np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    ml, mr, mt, mb = 70, 150, 40, 50
    pw, ph = width - ml - mr, height - mt - mb

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(x0, x1, logx):
        if x0 - 1e-12 <= v <= x1 + 1e-12:
            lab = f"1e{int(v)}" if logx else f"{v:.4g}"
            out.append(f'<line x1="{sx(v):.1f}" y1="{mt + ph}" x2="{sx(v):.1f}" y2="{mt + ph + 4}" stroke="black"/>')
            out.append(f'<text x="{sx(v):.1f}" y="{mt + ph + 16}" text-anchor="middle">{lab}</text>')
    for v in _ticks(y0, y1, logy):
        if y0 - 1e-12 <= v <= y1 + 1e-12:
            lab = f"1e{int(v)}" if logy else f"{v:.4g}"
            out.append(f'<line x1="{ml - 4}" y1="{sy(v):.1f}" x2="{ml}" y2="{sy(v):.1f}" stroke="black"/>')
            out.append(f'<text x="{ml - 6}" y="{sy(v) + 4:.1f}" text-anchor="end">{lab}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 16 {mt + ph / 2:.1f})">'
        f"{escape(ylabel)}</text>"
    )
    for k, (name, x, y) in enumerate(pts):
        color = palette[k % len(palette)]
        if x.size == 1:
            out.append(f'<circle cx="{sx(x[0]):.2f}" cy="{sy(y[0]):.2f}" r="3" fill="{color}"/>')
        elif x.size > 1:
            path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = mt + 14 * (k + 1)
        out.append(f'<line x1="{ml + pw + 10}" y1="{ly - 4}" x2="{ml + pw + 28}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw + 32}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _name(method, label):
    return f"{method} {label}".strip()


def totals_svg(result: ExperimentResult) -> str:
    rec = result.config.recipe
    curves = []
    finite_t = [t for s in result.series for t in s.times if math.isfinite(t)]
    tmax = max(finite_t) if finite_t else 1.0
    for s in result.series:
        if s.times.size == 1 and math.isinf(s.times[0]):
            # steady-state level drawn as a horizontal line
            curves.append((_name(s.method, s.label), [min(finite_t or [0.0]), tmax], [s.N[0], s.N[0]]))
        else:
            curves.append((_name(s.method, s.label), s.times, s.N))
    log = rec in LOG_XY
    return svg_plot(curves, f"{rec}: N(t)", "t", "N(t)", logx=log, logy=log)


def profiles_svg(result: ExperimentResult) -> str:
    rec = result.config.recipe
    curves = []
    for r in result.profiles:
        p = r.profile
        tl = "t=inf" if math.isinf(p.t) else f"t={p.t:g}"
        curves.append((f"{_name(r.method, r.label)} {tl}", np.arange(1, len(p.n) + 1), p.n))
    return svg_plot(curves, f"{rec}: n_i(t)", "site i", "n_i", logy=rec in LOG_Y)


def export(result: ExperimentResult, output_dir=None, formats=("csv", "svg")) -> list[Path]:
    """Write the result files; returns the paths written."""
    if result.is_empty():
        raise ValueError("empty result: nothing to export")
    out = Path(output_dir if output_dir is not None else result.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rec = result.config.recipe
    files: dict[Path, str] = {}
    if result.series:
        if "csv" in formats:
            files[out / f"{rec}_N_vs_t.csv"] = totals_csv(result)
        if "svg" in formats:
            files[out / f"{rec}_N_vs_t.svg"] = totals_svg(result)
    if result.profiles:
        if "csv" in formats:
            files[out / f"{rec}_profiles.csv"] = profiles_csv(result)
        if "svg" in formats:
            files[out / f"{rec}_profiles.svg"] = profiles_svg(result)
    temps = []
    try:
        for path, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{path.name}.", suffix=".tmp")
            temps.append((tmp, path))
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
        for tmp, path in temps:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in temps:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise
    return list(files)
