"""Weak-coupling Redfield equation for the lattice correlation matrix.

The correlation matrix ``C_{k,k'} = <a_k^dag a_k'>`` is kept in the eigenbasis
of the isolated lattice. It obeys ``dC/dt = M C + Q`` once flattened row-major,
``r = k * L + k'`` (0-based). Every bath property enters through two kernels:

* ``f_tilde[k', kb] = W_mk' W_mkb (J(lam_kb) - (i/pi) PV int J(w)/(w - lam_kb) dw)``
* ``F_tilde[k', k]  = W_mk' W_mk  (Jn(lam_k) - (i/pi) PV int Jn(w)/(w - lam_k) dw)``

with ``Jn = J * nbar``. For the semicircular ``J`` the first bracket is
``2 i Sigma^+(lam)`` in closed form; the second needs quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .core import (
    DensityProfile,
    DomainError,
    OccupationSeries,
    SetupSpec,
    occupation,
    spectral_density,
    system_hamiltonian,
)


class SingularGeneratorError(np.linalg.LinAlgError):
    """The generator has non-decaying modes that the source term excites."""


@dataclass(frozen=True)
class SystemModes:
    eigenvalues: np.ndarray
    transform: np.ndarray

    @property
    def L(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class HybridizationKernels:
    f_tilde: np.ndarray
    F_tilde: np.ndarray


@dataclass(frozen=True)
class RedfieldGenerator:
    """``dC/dt = M C + Q`` with ``C`` flattened row-major."""

    M: np.ndarray
    Q: np.ndarray

    @property
    def L(self) -> int:
        return math.isqrt(self.Q.shape[0])


def system_modes(spec: SetupSpec) -> SystemModes:
    w, v = np.linalg.eigh(system_hamiltonian(spec))
    return SystemModes(eigenvalues=w, transform=v)


def _bath_weight(spec: SetupSpec):
    def jn(w):
        return spectral_density(w, spec.gamma, spec.t_B) * occupation(w, spec.beta, spec.mu, spec.statistics)

    return jn


def hilbert_pv(func, lam: float, t_B: float, epsabs: float = 1e-14, epsrel: float = 1e-11) -> float:
    """``PV int_{-2t_B}^{2t_B} func(w) / (w - lam) dw`` by singularity subtraction.

    The pole is removed by subtracting ``func(lam)`` (whose PV integral is a
    logarithm) and the remainder is integrated on ``w = 2 t_B cos(theta)``,
    which tames square-root behaviour of ``func`` at the band edges.
    """
    a = 2.0 * t_B
    if not -a < lam < a:
        raise DomainError(f"pole {lam} outside the band (-{a}, {a})")
    f0 = func(lam)

    def integrand(theta):
        w = a * math.cos(theta)
        d = w - lam
        if d == 0.0:
            return 0.0
        return (func(w) - f0) / d * a * math.sin(theta)

    theta0 = math.acos(lam / a)
    part = 0.0
    for lo, hi in ((0.0, theta0), (theta0, math.pi)):
        val, _ = quad(integrand, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200)
        part += val
    return part + f0 * math.log((a - lam) / (a + lam))


def hilbert_pv_cauchy(func, lam: float, t_B: float) -> float:
    """Same integral through QUADPACK's Cauchy-weight rule (test oracle)."""
    a = 2.0 * t_B
    val, _ = quad(func, -a, a, weight="cauchy", wvar=lam, epsabs=1e-14, epsrel=1e-12, limit=400)
    return val


def hybridization_kernels(modes: SystemModes, spec: SetupSpec, pv=hilbert_pv) -> HybridizationKernels:
    """Bath kernels ``f_tilde`` and ``F_tilde`` in the lattice eigenbasis."""
    lam = modes.eigenvalues
    a = 2.0 * spec.t_B
    if np.any(np.abs(lam) >= a):
        raise DomainError("lattice band must lie inside the bath band (need 2g < 2 t_B)")
    wm = modes.transform[spec.m - 1, :]
    outer = np.outer(wm, wm)
    if spec.gamma == 0:
        z = np.zeros_like(outer, dtype=complex)
        return HybridizationKernels(f_tilde=z, F_tilde=z.copy())
    g2 = spec.gamma**2 / spec.t_B**2
    # J(lam) - (i/pi) PV int J/(w - lam), with PV = -pi gamma^2 lam / t_B^2
    bracket_f = spectral_density(lam, spec.gamma, spec.t_B) + 1j * g2 * lam
    jn = _bath_weight(spec)
    bracket_F = np.array([jn(x) - (1j / math.pi) * pv(jn, x, spec.t_B) for x in lam])
    return HybridizationKernels(f_tilde=outer * bracket_f[None, :], F_tilde=outer * bracket_F[None, :])


def assemble_generator(kernels: HybridizationKernels, modes: SystemModes) -> RedfieldGenerator:
    """Flatten the Redfield equation into ``M`` (L^2 x L^2) and ``Q`` (L^2)."""
    lam = modes.eigenvalues
    L = lam.shape[0]
    eye = np.eye(L)
    f = kernels.f_tilde
    F = kernels.F_tilde
    M = 1j * (np.kron(np.diag(lam), eye) - np.kron(eye, np.diag(lam)))
    M -= 0.5 * np.kron(eye, f)
    M -= 0.5 * np.kron(f.conj(), eye)
    Q = 0.5 * (F.T + F.conj()).reshape(-1)
    return RedfieldGenerator(M=M, Q=Q)


def generator_for(spec: SetupSpec) -> tuple[RedfieldGenerator, SystemModes]:
    modes = system_modes(spec)
    return assemble_generator(hybridization_kernels(modes, spec), modes), modes


class _Spectral:
    """Cached eigendecomposition of ``M`` with ``V^-1 Q``."""

    def __init__(self, gen: RedfieldGenerator):
        lam, vecs = np.linalg.eig(gen.M)
        self.lam = lam
        self.vecs = vecs
        self.cond = np.linalg.cond(vecs)
        self.coef = np.linalg.solve(vecs, gen.Q)


_SPECTRA: dict[int, tuple[RedfieldGenerator, _Spectral]] = {}


def _spectral(gen: RedfieldGenerator) -> _Spectral:
    hit = _SPECTRA.get(id(gen))
    if hit is not None and hit[0] is gen:
        return hit[1]
    sp = _Spectral(gen)
    _SPECTRA.clear()
    _SPECTRA[id(gen)] = (gen, sp)
    return sp


def _growth_factor(lam: np.ndarray, t: float) -> np.ndarray:
    """``(exp(lam t) - 1) / lam`` with the ``t`` limit for ``|lam t| < 1e-8``."""
    x = lam * t
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, lam)
    return np.where(small, t * (1.0 + 0.5 * x), np.expm1(x) / safe)


def _integrate(gen: RedfieldGenerator, t: float) -> np.ndarray:
    sol = solve_ivp(
        lambda _, y: gen.M @ y + gen.Q,
        (0.0, t),
        np.zeros_like(gen.Q),
        method="DOP853",
        rtol=1e-10,
        atol=1e-14,
    )
    if not sol.success:
        raise RuntimeError(f"Redfield integration failed: {sol.message}")
    return sol.y[:, -1]


def evolve_correlations(gen: RedfieldGenerator, t: float) -> np.ndarray:
    """``C(t)`` from ``C(0) = 0`` as an L x L matrix in the lattice eigenbasis."""
    if t < 0:
        raise ValueError("t must be non-negative")
    L = gen.L
    if t == 0:
        return np.zeros((L, L), dtype=complex)
    sp = _spectral(gen)
    if sp.cond > 1e12:
        warnings.warn(
            f"Redfield generator is close to defective (eigenvector condition {sp.cond:.3g}); "
            "integrating the ODE instead",
            RuntimeWarning,
            stacklevel=2,
        )
        c = _integrate(gen, t)
    else:
        c = sp.vecs @ (_growth_factor(sp.lam, t) * sp.coef)
    return c.reshape(L, L)


def _decaying(lam: np.ndarray) -> np.ndarray:
    scale = max(float(np.max(np.abs(lam.real))), 1e-300)
    return lam.real < -1e-7 * scale


def steady_state(gen: RedfieldGenerator) -> np.ndarray:
    """Long-time limit ``-M^-1 Q`` as an L x L matrix.

    Lattice modes with no weight on the injection site never couple to the
    bath and give ``M`` purely imaginary or zero eigenvalues. The limit still
    exists when the source has no component along them; the inverse is then
    taken on the decaying subspace only.
    """
    sp = _spectral(gen)
    L = gen.L
    dec = _decaying(sp.lam)
    if not np.all(dec):
        leak = np.max(np.abs(sp.coef[~dec]))
        if leak > 1e-10 * max(np.max(np.abs(sp.coef)), 1e-300):
            raise SingularGeneratorError(
                "generator has non-decaying modes driven by the source; no steady state"
            )
    return -(sp.vecs[:, dec] @ (sp.coef[dec] / sp.lam[dec])).reshape(L, L)


def slowest_rate(gen: RedfieldGenerator) -> float:
    """``min |Re lam|`` over the decaying eigenvalues of ``M``."""
    lam = _spectral(gen).lam
    return float(np.min(np.abs(lam.real[_decaying(lam)])))


def site_density(C: np.ndarray, modes: SystemModes, t: float = float("nan"), m: int = 1) -> DensityProfile:
    """Rotate back to sites: ``n_i = sum W_ik W_ik' C_kk'``."""
    C = np.asarray(C)
    W = modes.transform
    if C.shape != (modes.L, modes.L):
        raise ValueError("C does not match the mode count")
    n = np.einsum("ik,kl,il->i", W.conj(), C, W)
    return DensityProfile(t=t, n=np.real(n), m=m)


def early_slope(modes: SystemModes, spec: SetupSpec) -> float:
    """Initial growth rate ``dN/dt`` at ``t = 0``: ``sum_k |W_mk|^2 J(lam_k) nbar(lam_k)``."""
    lam = modes.eigenvalues
    wm2 = np.abs(modes.transform[spec.m - 1, :]) ** 2
    jn = spectral_density(lam, spec.gamma, spec.t_B) * occupation(lam, spec.beta, spec.mu, spec.statistics)
    return float(np.sum(wm2 * jn))


class RedfieldDynamics:
    """Convenience wrapper producing profiles and totals for one spec."""

    def __init__(self, spec: SetupSpec):
        self.spec = spec
        self.generator, self.modes = generator_for(spec)

    def profile(self, t: float) -> DensityProfile:
        return site_density(evolve_correlations(self.generator, t), self.modes, t=float(t), m=self.spec.m)

    def profiles(self, times) -> list[DensityProfile]:
        return [self.profile(t) for t in times]

    def steady_profile(self) -> DensityProfile:
        return site_density(steady_state(self.generator), self.modes, t=math.inf, m=self.spec.m)

    def total(self, times) -> OccupationSeries:
        times = np.asarray(times, dtype=float)
        N = [float(np.real(np.trace(evolve_correlations(self.generator, t)))) for t in times]
        return OccupationSeries(times=times, N=np.array(N), label="redfield")
