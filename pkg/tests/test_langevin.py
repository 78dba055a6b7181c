import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lattice_fill import langevin as lg
from lattice_fill import redfield
from lattice_fill.core import occupation, spectral_density, system_hamiltonian

from conftest import reference_spec


class TestSurfaceGreen:
    def test_values(self):
        assert lg.surface_green(0.0, 1.0) == pytest.approx(-1j, abs=1e-15)
        assert lg.surface_green(3.0, 1.0) == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0, rel=1e-14)
        assert lg.surface_green(-3.0, 1.0) == pytest.approx(-(3.0 - math.sqrt(5.0)) / 2.0, rel=1e-14)

    @pytest.mark.parametrize("w", [-1.5, 0.3, 1.2])
    def test_against_finite_chain(self, w):
        assert abs(lg.surface_green(w, 1.0) - lg.surface_green_modes(w, 1.0)) < 2e-3

    def test_bad_hopping(self):
        with pytest.raises(ValueError):
            lg.surface_green(0.0, 0.0)

    @given(st.floats(-1.999, 1.999), st.floats(0.2, 3.0), st.floats(1e-3, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_broadening_is_spectral_density(self, x, t_B, gamma):
        w = 2.0 * t_B * x
        spec = reference_spec(L=3, m=2, g=min(0.5, 0.4 * t_B), gamma=gamma, t_B=t_B, statistics="fermion")
        sigma = lg.self_energy(w, spec).value
        J = spectral_density(w, gamma, t_B)
        assert abs(-2.0 * sigma.imag - J) <= 1e-10 * max(1.0, J)

    @given(st.floats(2.001, 50.0))
    @settings(max_examples=50, deadline=None)
    def test_real_outside_band(self, w):
        for s in (w, -w):
            g = lg.surface_green(s, 1.0)
            assert g.imag == 0.0
            assert abs(g) <= 1.0


class TestGreen:
    def test_advanced_is_adjoint(self):
        spec = reference_spec(L=6, m=2, gamma=0.3)
        gp = lg.retarded_green(0.7, spec)
        a = (0.7 * np.eye(6) - system_hamiltonian(spec)).astype(complex)
        a[1, 1] -= np.conj(lg.self_energy(0.7, spec).value)
        gm = np.linalg.inv(a)
        np.testing.assert_allclose(gm, gp.conj().T, atol=1e-12)

    def test_column_matches_full(self):
        spec = reference_spec(L=7, m=3, gamma=0.4)
        for w in (-1.3, 0.0, 0.9, 2.5):
            np.testing.assert_allclose(lg.green_column(w, spec), lg.retarded_green(w, spec)[:, 2], atol=1e-12)

    def test_singular(self):
        # a decoupled site has a bare pole at its level
        spec = reference_spec(L=1, m=1, g=0.0, gamma=0.0)
        for f in (lg.retarded_green, lg.green_column):
            with pytest.raises(lg.SingularMatrixError) as info:
                f(0.0, spec)
            assert info.value.omega == 0.0


class TestSteadyDensity:
    def test_single_site_oracle(self):
        spec = reference_spec(L=1, m=1, g=0.0, gamma=0.5)

        def integrand(w):
            sigma = lg.self_energy(w, spec).value
            jn = spectral_density(w, 0.5, 1.0) * occupation(w, 1.0, -2.01, "boson")
            return jn / abs(w - sigma) ** 2 / (2 * math.pi)

        want, _ = quad(integrand, -2.0, 2.0, epsabs=1e-14, epsrel=1e-12, limit=400)
        assert lg.steady_density(spec).n[0] == pytest.approx(want, rel=1e-8)

    def test_weak_coupling_single_site_is_thermal(self):
        spec = reference_spec(L=1, m=1, g=0.0, gamma=1e-3)
        assert lg.steady_density(spec).n[0] == pytest.approx(occupation(0.0, 1.0, -2.01, "boson"), rel=1e-4)

    @pytest.mark.parametrize("mu", [-2.5, 0.0, 1.5])
    def test_fermion_bounds(self, mu):
        n = lg.steady_density(reference_spec(L=6, m=3, statistics="fermion", mu=mu)).n
        assert np.all(n >= 0) and np.all(n <= 1.0 + 1e-10)

    def test_bosons_above_fermions(self):
        b = lg.steady_density(reference_spec(L=6, m=3)).n
        f = lg.steady_density(reference_spec(L=6, m=3, statistics="fermion")).n
        assert np.all(b > f)

    def test_mirror_symmetry(self):
        n = lg.steady_density(reference_spec(L=9, m=5)).n
        np.testing.assert_allclose(n, n[::-1], rtol=1e-8)

    def test_tolerance_stable(self):
        spec = reference_spec(L=10, m=4)
        a = lg.steady_density(spec).n
        b = lg.steady_density(spec, epsrel=1e-12).n
        np.testing.assert_allclose(a, b, rtol=1e-8)

    def test_agrees_with_redfield_at_weak_coupling(self):
        spec = reference_spec(L=8, m=4, gamma=0.01)
        qle = lg.steady_density(spec).n
        red = redfield.RedfieldDynamics(spec).steady_profile().n
        assert np.max(np.abs(qle - red) / qle) < 0.05

    def test_reference_total(self):
        assert lg.steady_density(reference_spec()).N == pytest.approx(9.731, rel=0.005)
