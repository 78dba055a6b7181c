"""Fits and scaling diagnostics for occupation time series and profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import DensityProfile, OccupationSeries

MODELS = ("linear", "exp_relax", "power_law")


class FitError(ValueError):
    """Fit window or data unusable for the requested model."""


@dataclass(frozen=True)
class FitResult:
    """Outcome of a least-squares fit.

    ``params`` holds ``a, b`` (linear: ``N = a t + b``), ``N_SS, c, d``
    (exp_relax: ``N = N_SS - c exp(-d t)``) or ``prefactor, delta``
    (power_law: ``y = prefactor x^delta``). ``residual`` is the RMS residual
    of the fitted (possibly log-transformed) data.
    """

    model: str
    params: dict
    residual: float
    window: tuple[float, float]
    n_points: int = 0
    extra: dict = field(default_factory=dict)


def _window_mask(x, window):
    lo, hi = window
    if not lo < hi:
        raise FitError(f"degenerate window {window}")
    return (x >= lo) & (x <= hi)


def _line(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return coef[0], coef[1], float(np.sqrt(np.mean(resid**2)))


def fit(series: OccupationSeries, model: str, window, N_SS: float | None = None) -> FitResult:
    """Fit ``series`` over ``window = (t_lo, t_hi)`` (inclusive).

    ``exp_relax`` follows the usual procedure for relaxation towards a known
    plateau: ``log(N_SS - N)`` is fitted linearly in ``t`` with ``N_SS``
    supplied (typically by the Green's-function steady state).
    """
    if model not in MODELS:
        raise FitError(f"unknown model {model!r}; choose from {MODELS}")
    t = np.asarray(series.times, dtype=float)
    y = np.asarray(series.N, dtype=float)
    finite = np.isfinite(t)
    t, y = t[finite], y[finite]
    mask = _window_mask(t, window)
    if mask.sum() < 5:
        raise FitError(f"need at least 5 points in window {window}, have {int(mask.sum())}")
    t, y = t[mask], y[mask]
    window = (float(window[0]), float(window[1]))
    if model == "linear":
        a, b, res = _line(t, y)
        return FitResult("linear", {"a": float(a), "b": float(b)}, res, window, len(t))
    if model == "exp_relax":
        if N_SS is None:
            raise FitError("exp_relax needs N_SS")
        gap = N_SS - y
        if np.any(gap <= 0):
            raise FitError("N_SS - N(t) must be positive throughout the window")
        slope, icpt, res = _line(t, np.log(gap))
        d = -slope
        if not d > 0:
            raise FitError(f"fitted relaxation rate d = {d:.3g} is not positive")
        return FitResult(
            "exp_relax", {"N_SS": float(N_SS), "c": float(math.exp(icpt)), "d": float(d)}, res, window, len(t)
        )
    return power_law(t, y, window)


def power_law(x, y, window=None) -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("power-law fit needs positive data")
    delta, icpt, res = _line(np.log(x), np.log(y))
    window = window or (float(x.min()), float(x.max()))
    return FitResult("power_law", {"prefactor": float(math.exp(icpt)), "delta": float(delta)}, res, window, len(x))


def relaxation_exponent(sizes, t_ss) -> FitResult:
    """Fit ``t_SS = prefactor * L^delta``."""
    sizes = np.asarray(sizes, dtype=float)
    t_ss = np.asarray(t_ss, dtype=float)
    if sizes.shape != t_ss.shape or sizes.size < 3:
        raise FitError("need at least 3 (L, t_SS) pairs")
    if np.any(sizes <= 0) or np.any(t_ss <= 0):
        raise FitError("sizes and t_SS must be positive")
    return power_law(sizes, t_ss)


def relaxation_window(series: OccupationSeries, N_SS: float, lo: float = 1e-4, hi: float = 0.05) -> tuple[float, float]:
    """Time window where the relative gap ``(N_SS - N) / N_SS`` lies in ``(lo, hi)``.

    Below ``hi`` the approach is dominated by the slowest mode; above ``lo``
    the gap is still resolved against finite-bath and round-off noise.
    """
    t = np.asarray(series.times, dtype=float)
    gap = (N_SS - np.asarray(series.N, dtype=float)) / N_SS
    sel = np.isfinite(t) & (gap > lo) & (gap < hi)
    if sel.sum() < 5:
        raise FitError("fewer than 5 samples inside the relaxation window; extend the time grid")
    return float(t[sel].min()), float(t[sel].max())


def relaxation_time(series: OccupationSeries, N_SS: float, lo: float = 1e-4, hi: float = 0.05) -> FitResult:
    """``exp_relax`` fit on :func:`relaxation_window`; ``t_SS = 1/d`` is in ``extra``."""
    res = fit(series, "exp_relax", relaxation_window(series, N_SS, lo, hi), N_SS=N_SS)
    res.extra["t_SS"] = 1.0 / res.params["d"]
    return res


def departure_time(series: OccupationSeries, a: float, b: float, threshold: float = 0.05, t_min: float = 0.0) -> float:
    """First ``t >= t_min`` at which ``|N - (a t + b)| / N`` exceeds ``threshold``.

    ``t_min`` should be the start of the window the law was fitted on: before
    it the intercept ``b`` dominates and the comparison is meaningless.
    """
    t = np.asarray(series.times, dtype=float)
    N = np.asarray(series.N, dtype=float)
    for ti, ni in zip(t, N):
        if ti >= t_min and ti > 0 and ni > 0 and abs(ni - (a * ti + b)) / ni > threshold:
            return float(ti)
    return math.inf


def front_position(profile: DensityProfile, threshold: float = 1e-4) -> int:
    """Largest ``|offset|`` from the injection site with ``n_i > threshold``."""
    off = np.abs(profile.offsets())
    above = profile.n > threshold
    return int(off[above].max()) if above.any() else 0


def front_speeds(profiles, threshold: float = 1e-4) -> list[float]:
    """Front advance rate between successive snapshots."""
    profiles = sorted(profiles, key=lambda p: p.t)
    pos = [front_position(p, threshold) for p in profiles]
    return [(pos[k + 1] - pos[k]) / (profiles[k + 1].t - profiles[k].t) for k in range(len(pos) - 1)]


def scaled_profile(profile: DensityProfile, g: float):
    """``(nu, n)`` on the side ``i >= m`` with ``nu = (i - m) / (2 g t)``."""
    off = profile.offsets()
    keep = off >= 0
    return off[keep] / (2.0 * g * profile.t), profile.n[keep]


def collapse_check(profiles, g: float, nu_range=(0.1, 0.9), n_grid: int = 81, reference=None) -> float:
    """Maximum relative pointwise spread of profiles plotted against ``nu``.

    Each profile is interpolated linearly onto a common ``nu`` grid over
    ``nu_range``. Without ``reference`` the spread at each grid point is
    ``(max - min) / mean`` across profiles. With a callable ``reference(nu)``
    it is the largest ``|n - reference| / reference`` instead.
    """
    items = [p[1] if isinstance(p, tuple) else p for p in profiles]
    if len(items) < (1 if reference is not None else 2):
        raise ValueError("need at least 2 profiles")
    if reference is None and len({p.t for p in items}) < 2:
        raise ValueError("profiles must be taken at distinct times")
    lo, hi = nu_range
    grid = np.linspace(lo, hi, n_grid)
    rows = []
    for p in items:
        nu, n = scaled_profile(p, g)
        if nu.size < 2 or nu.max() < hi:
            raise ValueError(f"profile at t = {p.t} covers nu up to {nu.max() if nu.size else 0:.3g} < {hi}")
        rows.append(np.interp(grid, nu, n))
    rows = np.array(rows)
    if reference is not None:
        ref = np.array([reference(x) for x in grid])
        return float(np.max(np.abs(rows - ref[None, :]) / ref[None, :]))
    mean = rows.mean(axis=0)
    return float(np.max((rows.max(axis=0) - rows.min(axis=0)) / mean))
