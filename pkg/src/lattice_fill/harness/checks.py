"""Recipe-level tolerance checks.

Each recipe maps to a list of named checks with the target value and the
tolerance it is held to. ``check_result`` evaluates them on a finished
:class:`ExperimentResult`; the CLI turns the outcome into a JSON report and
an exit code.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .. import lindblad, redfield
from ..core import OccupationSeries
from . import analysis
from .experiment import ExperimentResult

# reference values and tolerances
FIG2_SLOPE, FIG2_SLOPE_TOL, FIG2_SLOPE_WINDOW = 0.058, 0.10, (5.0, 50.0)
FIG2_NSS, FIG2_NSS_TOL = 9.731, 0.005
FIG2_LATE_T, FIG2_LATE_TOL = 4000.0, 0.02
FIG2_D, FIG2_D_FACTOR = 4.95e-4, 1.5
FIG3_SLOPE_WINDOW = (10.0, 30.0)
FIG3_SHARED_LAW_WINDOW = (5.0, 50.0)
FIG3_DEPARTURE = 0.05
TSS_REFERENCE = {16: 175.0, 20: 330.0, 40: 2000.0}
TSS_TOL = 0.25
DELTA_RANGE = (2.3, 2.9)
FIG4_TOL, FIG4_TMIN = 0.02, 400.0
FIG5_SPEED_TOL, FIG5_THRESHOLD = 0.10, 1e-4
FIG4A_SITE_TOL, FIG4A_FLOOR = 0.05, 1e-4
FIG4A_SLOPE_TOL, FIG4A_SLOPE_WINDOW = 0.03, (100.0, 1000.0)
FIG8_SITE_TOL, FIG8_FLOOR = 0.10, 1e-5
FIG8_SLOPE_TOL, FIG8_SLOPE_WINDOW = 0.05, (90.0, 180.0)
FIG10_TOL, FIG10_NU = 0.05, (0.1, 0.9)


@dataclass
class Check:
    name: str
    value: float
    target: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.6g} (target {self.target}){' ' + self.detail if self.detail else ''}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["value"] = float(self.value) if math.isfinite(self.value) else None
        d["passed"] = bool(self.passed)
        return d


def _series(s) -> OccupationSeries:
    return OccupationSeries(times=np.asarray(s.times), N=np.asarray(s.N), label=s.method)


def _rel(a, b) -> float:
    return abs(a - b) / abs(b)


def _max_site_error(p, q, floor=0.0) -> float:
    """Largest ``|p - q| / q`` over sites with ``q > floor``."""
    sel = q > floor
    return float(np.max(np.abs(p[sel] - q[sel]) / q[sel])) if sel.any() else 0.0


def check_fig2(res: ExperimentResult) -> list[Check]:
    ex = _series(res.get_series("exact"))
    nss = res.get_series("langevin").N[0]
    early = analysis.fit(ex, "linear", FIG2_SLOPE_WINDOW)
    a = early.params["a"]
    t = np.asarray(ex.times)
    k = int(np.argmin(np.abs(t - FIG2_LATE_T)))
    late = _rel(ex.N[k], nss)
    relax = analysis.relaxation_time(ex, nss)
    d = relax.params["d"]
    return [
        Check("fig2.early_slope", a, f"{FIG2_SLOPE} +/- {FIG2_SLOPE_TOL:.0%}", _rel(a, FIG2_SLOPE) <= FIG2_SLOPE_TOL,
              f"window {FIG2_SLOPE_WINDOW}, intercept {early.params['b']:.4g}"),
        Check("fig2.N_SS", nss, f"{FIG2_NSS} +/- {FIG2_NSS_TOL:.1%}", _rel(nss, FIG2_NSS) <= FIG2_NSS_TOL),
        Check("fig2.N_late_vs_N_SS", late, f"<= {FIG2_LATE_TOL} at t={t[k]:g}", late <= FIG2_LATE_TOL),
        Check("fig2.relaxation_rate", d, f"{FIG2_D} within x{FIG2_D_FACTOR}",
              FIG2_D / FIG2_D_FACTOR <= d <= FIG2_D * FIG2_D_FACTOR, f"window {relax.window}"),
    ]


def fig3_numbers(res: ExperimentResult) -> dict:
    """Early slopes, departure times and t_SS for every lattice size."""
    sizes = res.config.sizes
    out = {"sizes": list(sizes), "slope": {}, "departure": {}, "t_SS": {}}
    ref_L = max(sizes)
    law = analysis.fit(_series(res.get_series("exact", f"L={ref_L}")), "linear", FIG3_SHARED_LAW_WINDOW)
    a, b = law.params["a"], law.params["b"]
    out["shared_law"] = (a, b)
    for L in sizes:
        s = _series(res.get_series("exact", f"L={L}"))
        out["slope"][L] = analysis.fit(s, "linear", FIG3_SLOPE_WINDOW).params["a"]
        out["departure"][L] = analysis.departure_time(s, a, b, FIG3_DEPARTURE, t_min=FIG3_SHARED_LAW_WINDOW[0])
        if "langevin" in res.config.methods:
            nss = res.get_series("langevin", f"L={L}").N[0]
            out["t_SS"][L] = analysis.relaxation_time(s, nss).extra["t_SS"]
    return out


def check_fig3(res: ExperimentResult) -> list[Check]:
    nums = fig3_numbers(res)
    sizes = nums["sizes"]
    checks = []
    for L in sizes:
        a = nums["slope"][L]
        checks.append(Check(f"fig3.early_slope[L={L}]", a, f"{FIG2_SLOPE} +/- {FIG2_SLOPE_TOL:.0%}",
                            _rel(a, FIG2_SLOPE) <= FIG2_SLOPE_TOL, f"window {FIG3_SLOPE_WINDOW}"))
    dep = [nums["departure"][L] for L in sizes]
    mono = all(x < y for x, y in zip(dep, dep[1:]))
    checks.append(Check("fig3.departure_increasing", float(dep[-1]), "strictly increasing in L", mono,
                        "times " + ", ".join(f"L={L}: {d:g}" for L, d in zip(sizes, dep))))
    if nums["t_SS"]:
        for L in sizes:
            tss = nums["t_SS"][L]
            ref = TSS_REFERENCE.get(L)
            if ref is not None:
                checks.append(Check(f"t_SS[L={L}]", tss, f"{ref:g} +/- {TSS_TOL:.0%}", _rel(tss, ref) <= TSS_TOL))
        fitres = analysis.relaxation_exponent(sizes, [nums["t_SS"][L] for L in sizes])
        delta = fitres.params["delta"]
        checks.append(Check("t_SS.delta", delta, f"in {list(DELTA_RANGE)}", DELTA_RANGE[0] <= delta <= DELTA_RANGE[1]))
    return checks


def check_fig4(res: ExperimentResult) -> list[Check]:
    ss = res.get_profiles("langevin")[0].n
    checks = []
    for p in res.get_profiles("exact"):
        if p.t < FIG4_TMIN:
            continue
        err = _max_site_error(p.n, ss)
        checks.append(Check(f"fig4.profile[t={p.t:g}]", err, f"<= {FIG4_TOL}", err <= FIG4_TOL))
    return checks


def check_fig5(res: ExperimentResult) -> list[Check]:
    g = res.config.spec.g
    speeds = analysis.front_speeds(res.get_profiles("exact"), FIG5_THRESHOLD)
    return [
        Check(f"fig5.front_speed[{k}]", v, f"{2 * g:g} +/- {FIG5_SPEED_TOL:.0%}", _rel(v, 2 * g) <= FIG5_SPEED_TOL)
        for k, v in enumerate(speeds)
    ]


def check_fig4a(res: ExperimentResult) -> list[Check]:
    spec = res.config.spec
    checks = []
    ex = {p.t: p.n for p in res.get_profiles("exact")}
    for p in res.get_profiles("redfield"):
        err = _max_site_error(p.n, ex[p.t], FIG4A_FLOOR)
        checks.append(Check(f"fig4a.profile[t={p.t:g}]", err, f"<= {FIG4A_SITE_TOL} where n_i > {FIG4A_FLOOR}",
                            err <= FIG4A_SITE_TOL))
    slope = res.meta["early_slope"][""] if "early_slope" in res.meta else redfield.early_slope(redfield.system_modes(spec), spec)
    for method in ("redfield", "exact"):
        a = analysis.fit(_series(res.get_series(method)), "linear", FIG4A_SLOPE_WINDOW).params["a"]
        checks.append(Check(f"fig4a.slope[{method}]", a, f"{slope:.6g} +/- {FIG4A_SLOPE_TOL:.0%}",
                            _rel(a, slope) <= FIG4A_SLOPE_TOL, f"window {FIG4A_SLOPE_WINDOW}"))
    return checks


def check_fig8(res: ExperimentResult) -> list[Check]:
    spec = res.config.spec
    rates = lindblad.rates(spec)
    checks = []
    ex = {p.t: p.n for p in res.get_profiles("exact")}
    for p in res.get_profiles("lindblad", "analytic"):
        err = _max_site_error(p.n, ex[p.t], FIG8_FLOOR)
        checks.append(Check(f"fig8.profile[t={p.t:g}]", err, f"<= {FIG8_SITE_TOL} where n_i > {FIG8_FLOOR}",
                            err <= FIG8_SITE_TOL))
    a = analysis.fit(_series(res.get_series("exact")), "linear", FIG8_SLOPE_WINDOW).params["a"]
    target = 2.0 * rates.gamma_G
    checks.append(Check("fig8.slope", a, f"{target:.6g} +/- {FIG8_SLOPE_TOL:.0%}", _rel(a, target) <= FIG8_SLOPE_TOL,
                        f"window {FIG8_SLOPE_WINDOW}"))
    return checks


def check_fig10(res: ExperimentResult) -> list[Check]:
    spec = res.config.spec
    rates = lindblad.rates(spec)
    profiles = res.get_profiles("lindblad")
    spread = analysis.collapse_check(profiles, spec.g, FIG10_NU)
    checks = [Check("fig10.collapse_spread", spread, f"<= {FIG10_TOL}", spread <= FIG10_TOL, f"nu in {FIG10_NU}")]
    ref = lambda nu: lindblad.scaling_function(nu, rates, spec.g)  # noqa: E731
    for p in profiles:
        dev = analysis.collapse_check([p], spec.g, FIG10_NU, reference=ref)
        checks.append(Check(f"fig10.vs_Phi[t={p.t:g}]", dev, f"<= {FIG10_TOL}", dev <= FIG10_TOL, f"nu in {FIG10_NU}"))
    return checks


def check_compare_fb(res: ExperimentResult) -> list[Check]:
    b = res.get_series("exact", "boson")
    f = res.get_series("exact", "fermion")
    pos = b.times > 0
    below = bool(np.all(f.N[pos] < b.N[pos]))
    gap = float(np.min(b.N[pos] - f.N[pos]))
    ab = analysis.fit(_series(b), "linear", FIG2_SLOPE_WINDOW).params["a"]
    af = analysis.fit(_series(f), "linear", FIG2_SLOPE_WINDOW).params["a"]
    return [
        Check("compare_fb.fermion_below_boson", gap, "> 0 for all t > 0", below),
        Check("compare_fb.early_slope_order", af / ab, "< 1 (fermion / boson)", af < ab),
    ]


CHECKS = {
    "fig2": check_fig2,
    "fig3": check_fig3,
    "fig4": check_fig4,
    "fig5": check_fig5,
    "fig4a": check_fig4a,
    "fig8": check_fig8,
    "fig10": check_fig10,
    "compare_fb": check_compare_fb,
    "custom": lambda res: [],
}


def check_result(res: ExperimentResult) -> list[Check]:
    return CHECKS[res.config.recipe](res)


def report(checks: list[Check]) -> dict:
    return {"passed": bool(all(c.passed for c in checks)), "checks": [c.to_dict() for c in checks]}
