"""Exact steady state from the retarded Green's function of the lattice.

Eliminating the semi-infinite bath leaves the lattice with a self-energy on
the injection site, ``Sigma^+(w) = gamma^2 g_s(w)`` where ``g_s`` is the
surface Green's function of the bath chain. The stationary occupations are

    n_i = int dw |G^+_im(w)|^2 J(w) nbar(w) / (2 pi),

exact to all orders in ``gamma``. The integral runs over the bath band on
``w = 2 t_B cos(theta)`` so that the band-edge square roots become smooth.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import solve_banded

from .core import SetupSpec, bath_normal_modes, occupation, spectral_density, system_hamiltonian

OUTSIDE_BAND_ETA = 1e-10


class SingularMatrixError(np.linalg.LinAlgError):
    """``w I - h - Sigma^+(w)`` is not invertible at ``omega``."""

    def __init__(self, omega: float):
        super().__init__(f"w I - h - Sigma(w) is singular at w = {omega!r}")
        self.omega = omega


@dataclass(frozen=True)
class SelfEnergy:
    """Retarded self-energy of the injection site at one frequency."""

    omega: float
    value: complex
    band: tuple[float, float]


@dataclass(frozen=True)
class SteadyProfile:
    n: np.ndarray

    @property
    def N(self) -> float:
        return float(np.sum(self.n))


def surface_green(omega: float, t_B: float) -> complex:
    """Retarded boundary Green's function of a semi-infinite chain with hopping ``t_B``."""
    if not t_B > 0:
        raise ValueError("t_B must be positive")
    a = 2.0 * t_B
    d = abs(omega)
    root = math.sqrt(abs((a - d) * (a + d)))
    if d <= a:
        return complex(omega, -root) / (2.0 * t_B * t_B)
    return complex(omega - math.copysign(root, omega)) / (2.0 * t_B * t_B)


@functools.lru_cache(maxsize=4)
def _surface_weights(L_B: int, t_B: float) -> tuple[np.ndarray, np.ndarray]:
    modes = bath_normal_modes(L_B, t_B)
    return modes.eigenvalues, modes.transform[0, :] ** 2


def surface_green_modes(omega: float, t_B: float, L_B: int = 8192, eta: float = 1e-3) -> complex:
    """Finite-chain estimate ``sum_q U_1q^2 / (w - lam_q + i eta)`` (test oracle)."""
    lam, weights = _surface_weights(int(L_B), float(t_B))
    return complex(np.sum(weights / (omega - lam + 1j * eta)))


def self_energy(omega: float, spec: SetupSpec) -> SelfEnergy:
    return SelfEnergy(
        omega=float(omega),
        value=spec.gamma**2 * surface_green(omega, spec.t_B),
        band=(-2.0 * spec.t_B, 2.0 * spec.t_B),
    )


def _banded(omega: complex, spec: SetupSpec) -> np.ndarray:
    """``w I - h - Sigma`` in LAPACK banded storage (one super/sub diagonal)."""
    L = spec.L
    ab = np.zeros((3, L), dtype=complex)
    ab[0, 1:] = -spec.g
    ab[2, :-1] = -spec.g
    ab[1, :] = omega
    sigma = spec.gamma**2 * surface_green(float(np.real(omega)), spec.t_B)
    ab[1, spec.m - 1] -= sigma
    return ab


def _shifted(omega: float, spec: SetupSpec) -> complex:
    if abs(omega) > 2.0 * spec.t_B:
        return complex(omega, OUTSIDE_BAND_ETA)
    return complex(omega)


def green_column(omega: float, spec: SetupSpec) -> np.ndarray:
    """Column ``m`` of ``G^+(w)``, the only part the steady state needs."""
    rhs = np.zeros(spec.L, dtype=complex)
    rhs[spec.m - 1] = 1.0
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            col = solve_banded((1, 1), _banded(_shifted(omega, spec), spec), rhs, check_finite=False)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(omega) from None
    if not np.all(np.isfinite(col)):
        raise SingularMatrixError(omega)
    return col


def retarded_green(omega: float, spec: SetupSpec) -> np.ndarray:
    """Full ``G^+(w) = [w I - h - Sigma^+(w)]^{-1}`` (L x L)."""
    w = _shifted(omega, spec)
    a = w * np.eye(spec.L) - system_hamiltonian(spec)
    a[spec.m - 1, spec.m - 1] -= spec.gamma**2 * surface_green(omega, spec.t_B)
    try:
        out = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(omega) from None
    if not np.all(np.isfinite(out)) or np.linalg.cond(a) > 1e15:
        raise SingularMatrixError(omega)
    return out


def steady_density(spec: SetupSpec, epsrel: float = 1e-10, epsabs: float = 1e-14) -> SteadyProfile:
    """Stationary lattice occupations from the frequency integral.

    Breakpoints are placed at the isolated-lattice eigenvalues: for weak
    coupling the integrand is a set of narrow Lorentzians centred there.
    """
    a = 2.0 * spec.t_B
    lam = np.linalg.eigvalsh(system_hamiltonian(spec))
    inside = lam[np.abs(lam) < a]
    points = np.sort(np.arccos(inside / a))

    def integrand(theta):
        w = a * math.cos(theta)
        col = green_column(w, spec)
        weight = spectral_density(w, spec.gamma, spec.t_B) * occupation(w, spec.beta, spec.mu, spec.statistics)
        return np.abs(col) ** 2 * (weight * a * math.sin(theta) / (2.0 * math.pi))

    n, err = quad_vec(integrand, 0.0, math.pi, epsrel=epsrel, epsabs=epsabs, points=points, limit=20000)
    return SteadyProfile(n=np.asarray(n, dtype=float))
