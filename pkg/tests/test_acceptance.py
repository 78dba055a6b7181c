"""End-to-end acceptance criteria.

Each test evaluates one criterion at its stated parameters and tolerance and
records a PASS/FAIL line, shown in the pytest terminal summary. Criteria
that cannot be met as stated are marked strict xfail with the reason; their
line still reads FAIL.
"""

import math

import numpy as np
import pytest

from lattice_fill import exact, langevin, lindblad, redfield
from lattice_fill.core import bath_normal_modes, build_full_hamiltonian, occupation, spectral_density
from lattice_fill.harness import checks

from conftest import ACCEPTANCE_LINES, reference_spec, recipe_result

pytestmark = pytest.mark.slow


def _record(number, cs, title, note=""):
    ok = all(c.passed for c in cs)
    parts = "; ".join(f"{c.name}={c.value:.4g} [{'ok' if c.passed else 'FAIL'}, {c.target}]" for c in cs)
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}: {parts}" + (f" ({note})" if note else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _assert_all(cs):
    bad = [c.line() for c in cs if not c.passed]
    assert not bad, "\n".join(bad)


# the three fill-curve recipes share the L=40 diagonalisation; run them in sequence
def test_criterion_01_fill_curve():
    cs = checks.check_fig2(recipe_result("fig2"))
    _record(1, cs, "N(t) at L=40, gamma=1")
    _assert_all(cs)


def test_criterion_09_statistics_ordering():
    cs = checks.check_compare_fb(recipe_result("compare_fb"))
    _record(9, cs, "fermion below boson")
    _assert_all(cs)


def _fig3_checks():
    return checks.check_fig3(recipe_result("fig3"))


def test_criterion_02_shared_slope_and_departure():
    cs = [c for c in _fig3_checks() if c.name.startswith("fig3.")]
    _record(2, cs, "L in {16, 20, 40}")
    _assert_all(cs)


def test_criterion_03_relaxation_time_scaling():
    cs = [c for c in _fig3_checks() if c.name.startswith("t_SS")]
    _record(3, cs, "t_SS and delta")
    _assert_all(cs)


def _fig4_checks():
    return checks.check_fig4(recipe_result("fig4"))


def test_criterion_04_long_time_profile():
    cs = _fig4_checks()
    _record(4, cs, "profile vs Green's-function steady state, L=20",
            "t=400 is about 1.2 t_SS after switch-on and still relaxing; see the t=400 xfail")
    late = [c for c in cs if c.name != "fig4.profile[t=400]"]
    assert late
    _assert_all(late)


@pytest.mark.xfail(strict=True, reason="at t=400 the L=20 lattice is still about 6% short of its steady N; "
                   "sitewise 2% agreement is reached only after a few t_SS")
def test_criterion_04_profile_at_400():
    cs = [c for c in _fig4_checks() if c.name == "fig4.profile[t=400]"]
    assert cs
    _assert_all(cs)


def test_criterion_05_redfield_vs_exact():
    cs = checks.check_fig4a(recipe_result("fig4a"))
    _record(5, cs, "Redfield vs exact, L=21, gamma=0.01")
    _assert_all(cs)


def test_criterion_06_lindblad_vs_exact():
    cs = checks.check_fig8(recipe_result("fig8"))
    _record(6, cs, "Lindblad density vs exact, L=41, g=0.05, gamma=0.01")
    _assert_all(cs)


@pytest.mark.xfail(strict=True, reason="at t=90 and 180 the profiles still carry Bessel oscillations and a "
                   "finite-width front; they approach Phi only at t of order 1000")
def test_criterion_07_scaling_collapse():
    cs = checks.check_fig10(recipe_result("fig10"))
    _record(7, cs, "collapse onto Phi(nu), nu in [0.1, 0.9]")
    _assert_all(cs)


def test_criterion_08_ballistic_front():
    cs = checks.check_fig5(recipe_result("fig5"))
    _record(8, cs, "front speed 2g, L=100, g=0.25")
    _assert_all(cs)


def _property_suite():
    out = []

    def add(name, value, target, ok):
        out.append(checks.Check(name, float(value), target, bool(ok)))

    # exact dynamics: trace, Hermiticity, bounds, mirror symmetry, Rabi oracle
    for stats, mu in (("boson", -2.01), ("fermion", 0.3)):
        s = reference_spec(L=7, L_B=120, m=4, statistics=stats, mu=mu)
        c0 = exact.initial_correlation(s, bath_normal_modes(s.L_B, s.t_B))
        prop = exact.Propagator.from_hamiltonian(build_full_hamiltonian(s))
        tr0 = c0.trace().real
        for t in (5.0, 37.0):
            c = exact.propagate(c0, prop, t)
            n = exact.density_profile(c, s.L).n
            add(f"trace[{stats},t={t:g}]", abs(c.trace().real - tr0) / tr0, "<= 1e-8", abs(c.trace().real - tr0) / tr0 <= 1e-8)
            add(f"hermiticity[{stats},t={t:g}]", c.hermiticity_error(), "<= 1e-9", c.hermiticity_error() <= 1e-9)
            mirror = np.max(np.abs(n - n[::-1]))
            add(f"mirror[{stats},t={t:g}]", mirror, "<= 1e-8", mirror <= 1e-8)
            if stats == "fermion":
                d = c.diagonal()
                add(f"fermion_bounds[t={t:g}]", np.max(d), "in [0, 1]", np.all((d >= -1e-12) & (d <= 1 + 1e-10)))
    s = reference_spec(L=1, L_B=1, m=1, gamma=0.3)
    c0 = exact.initial_correlation(s, bath_normal_modes(1, 1.0))
    prop = exact.Propagator.from_hamiltonian(build_full_hamiltonian(s))
    n0 = occupation(0.0, 1.0, -2.01, "boson")
    rabi = max(abs(exact.density_profile(exact.propagate(c0, prop, t), 1).n[0] - n0 * math.sin(0.3 * t) ** 2)
               for t in np.linspace(0.0, 20.0, 41))
    add("two_site_rabi", rabi, "<= 1e-8", rabi <= 1e-8)

    # rates
    for stats in ("boson", "fermion"):
        spec = reference_spec(gamma=0.01, statistics=stats)
        r = lindblad.rates(spec)
        sign = spec.statistics.sign
        n = occupation(0.0, 1.0, -2.01, stats)
        db = abs(r.gamma_G * (1 + sign * n) - r.gamma_L * n) / r.gamma_L
        add(f"detailed_balance[{stats}]", db, "machine precision", db <= 4 * np.finfo(float).eps)
    rb = lindblad.rates(reference_spec(gamma=0.01))
    rf = lindblad.rates(reference_spec(gamma=0.01, statistics="fermion"))
    add("gamma_prime_statistics_independent", abs(rb.gamma_prime - rf.gamma_prime), "== 0", rb.gamma_prime == rf.gamma_prime)

    # self-energy broadening
    spec = reference_spec(gamma=0.7)
    worst = max(abs(-2 * langevin.self_energy(w, spec).value.imag
                    - spectral_density(w, 0.7, 1.0)) for w in np.linspace(-1.999, 1.999, 401))
    add("minus_2_Im_Sigma_equals_J", worst, "<= 1e-10", worst <= 1e-10)

    # Redfield spectrum
    gen, _ = redfield.generator_for(reference_spec(L=3, m=1, gamma=0.01))
    top = np.max(np.linalg.eigvals(gen.M).real)
    add("redfield_spectrum_negative", top, "< 0", top < 0)

    # growth law: closed form, quadrature and expansions
    for gt in (0.1, 0.5, 2.0, 10.0, 1000.0):
        r = lindblad.LindbladRates(gamma_G=1.0, gamma_L=1.0001, gamma_prime=1e-4, g_tilde=gt)
        g = 0.5 * gt * 1e-4
        err = abs(lindblad.total_rate(r, g) / lindblad.total_rate_quadrature(r, g) - 1)
        add(f"total_rate_closed_vs_quad[g~={gt:g}]", err, "<= 1e-8", err <= 1e-8)
    r = lindblad.LindbladRates(gamma_G=1.0, gamma_L=1.0001, gamma_prime=1e-4, g_tilde=1e-3)
    g = 0.5e-7
    err = abs(lindblad.total_rate_small(r, g) / lindblad.total_rate(r, g) - 1)
    add("small_g_expansion[g~=1e-3]", err, "<= 1e-5", err <= 1e-5)
    r = lindblad.LindbladRates(gamma_G=1.0, gamma_L=1.0001, gamma_prime=1e-4, g_tilde=1e4)
    g = 0.5
    err = abs(lindblad.total_rate_large(r, g) / lindblad.total_rate(r, g) - 1)
    add("large_g_expansion[g~=1e4]", err, "<= 1e-5", err <= 1e-5)
    return out


def test_criterion_10_property_suite():
    cs = _property_suite()
    failed = [c for c in cs if not c.passed]
    # the line lists the failures, or the worst trace and Hermiticity errors when all pass
    shown = failed or [max((c for c in cs if c.name.startswith(k)), key=lambda c: c.value)
                       for k in ("trace", "hermiticity", "mirror", "two_site_rabi", "minus_2")]
    _record(10, shown, f"{len(cs) - len(failed)}/{len(cs)} property checks pass")
    _assert_all(cs)


def _no_loss(stats):
    spec = reference_spec(L=61, m=31, g=0.05, gamma=0.01, statistics=stats)
    # gain set directly to the hopping scale
    r = lindblad.LindbladRates(gamma_G=0.05, gamma_L=0.0, gamma_prime=0.05, g_tilde=2.0)
    ts = np.linspace(50.0, 200.0, 31)
    N = np.array([p.N for p in lindblad.evolve_lindblad(spec, r, ts, detailed_balance=False)])
    return ts, N


def test_criterion_11_no_loss_mode():
    ts, Nf = _no_loss("fermion")
    coef = np.polyfit(ts, Nf, 1)
    resid = Nf - np.polyval(coef, ts)
    r2 = 1.0 - np.sum(resid**2) / np.sum((Nf - Nf.mean()) ** 2)
    ts, Nb = _no_loss("boson")
    late = float(np.gradient(np.log(Nb), np.log(ts))[-5:].mean())
    cs = [
        checks.Check("fermion_linear_R2", r2, "> 0.999 on t in [50, 200]", r2 > 0.999),
        checks.Check("boson_late_log_slope", late, "> 1.2", late > 1.2),
    ]
    _record(11, cs, "no-loss mode, Gamma_G = g = 0.05")
    _assert_all(cs)
