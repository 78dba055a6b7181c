"""Local Lindblad description: rates, analytic solutions and a direct integrator.

With gain ``Gamma_G`` and loss ``Gamma_L`` on the injection site the lattice
correlations obey a closed linear equation. On an infinite lattice the
density at offset ``i`` from the injection site is

    n_i(t) = 2 Gamma_G int_0^t |S_i(tau)|^2 dtau,

where ``S_i`` is a damped Bessel amplitude. At late times ``n_i(t)`` depends
on ``i`` and ``t`` only through ``nu = i / (2 g t)``, and ``N(t)`` grows
linearly at the rate returned by :func:`total_rate`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp

from . import kernels
from .core import (
    DensityProfile,
    DomainError,
    ParticleStatistics,
    SetupSpec,
    bessel_j,
    bessel_zeros_mcmahon,
    occupation,
    spectral_density,
)

INNER_RTOL = 1e-9
INNER_ATOL = 1e-14
OUTER_RTOL = 1e-7


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class AmplitudeMode(Enum):
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class LindbladRates:
    """Gain, loss and derived constants of the local Lindblad equation.

    ``gamma_prime = gamma_L - sign * gamma_G`` and ``g_tilde = 2 g / gamma_prime``.
    """

    gamma_G: float
    gamma_L: float
    gamma_prime: float
    g_tilde: float

    def __post_init__(self):
        if self.gamma_G < 0 or self.gamma_L < 0:
            raise ValueError("gain and loss must be non-negative")


def rates(spec: SetupSpec) -> LindbladRates:
    j0 = spectral_density(0.0, spec.gamma, spec.t_B)
    n0 = occupation(0.0, spec.beta, spec.mu, spec.statistics)
    sign = spec.statistics.sign
    gain = 0.5 * j0 * n0
    loss = 0.5 * j0 * (1.0 + sign * n0)
    prime = 0.5 * j0
    return LindbladRates(gamma_G=gain, gamma_L=loss, gamma_prime=prime, g_tilde=2.0 * spec.g / prime)


def _quad(func, a, b, *, epsrel, epsabs, limit=200, points=None):
    """scipy ``quad`` that retries with more subintervals, then raises."""
    for lim in (limit, 4 * limit):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", IntegrationWarning)
            val, err = quad(func, a, b, epsrel=epsrel, epsabs=epsabs, limit=lim, points=points)
        if not any(issubclass(w.category, IntegrationWarning) for w in caught):
            return val
    if err > 10.0 * max(epsabs, epsrel * abs(val)):
        raise QuadratureError(f"quadrature on [{a}, {b}] reached only {err:.3g} (value {val:.6g})")
    return val


def amplitude(i: int, tau: float, rates: LindbladRates, g: float, mode=AmplitudeMode.EXACT) -> complex:
    """Amplitude ``S_i(tau)`` at offset ``i`` from the injection site.

    Exact mode evaluates

        J_i(2 g tau) - G' int_0^tau e^{-G' s} ((tau - s)/(tau + s))^{i/2} J_i(2 g sqrt(tau^2 - s^2)) ds

    by adaptive quadrature. Asymptotic mode returns the late-time form
    ``i J_i(2 g tau) / (i + tau G')``.
    """
    mode = AmplitudeMode(mode)
    i = abs(int(i))
    if tau < 0:
        raise ValueError("tau must be non-negative")
    gp = rates.gamma_prime
    if mode is AmplitudeMode.ASYMPTOTIC:
        if i == 0 and tau == 0:
            return complex(1.0)
        return complex(i * bessel_j(i, 2.0 * g * tau) / (i + tau * gp))
    free = bessel_j(i, 2.0 * g * tau)
    if tau == 0 or gp == 0:
        return complex(free)

    def integrand(s):
        r = math.sqrt(max(tau * tau - s * s, 0.0))
        ratio = ((tau - s) / (tau + s)) ** (0.5 * i) if i else 1.0
        return math.exp(-gp * s) * ratio * bessel_j(i, 2.0 * g * r)

    corr = _quad(integrand, 0.0, tau, epsrel=INNER_RTOL, epsabs=INNER_ATOL)
    return complex(free - gp * corr)


def density(i: int, t: float, rates: LindbladRates, g: float, mode=AmplitudeMode.EXACT) -> float:
    """``n_i(t) = 2 Gamma_G int_0^t |S_i(tau)|^2 dtau``.

    The range is split at the zeros of ``J_i(2 g tau)`` so each panel holds
    at most one oscillation.
    """
    i = abs(int(i))
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0 or rates.gamma_G == 0:
        return 0.0

    def integrand(tau):
        return abs(amplitude(i, tau, rates, g, mode)) ** 2

    if g > 0:
        edges = bessel_zeros_mcmahon(i, 2.0 * g * t) / (2.0 * g)
    else:
        edges = np.array([])
    edges = np.concatenate(([0.0], edges[(edges > 0) & (edges < t)], [t]))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _quad(integrand, lo, hi, epsrel=OUTER_RTOL, epsabs=1e-16)
    return 2.0 * rates.gamma_G * total


def density_profile(offsets, t: float, rates: LindbladRates, g: float, mode=AmplitudeMode.EXACT, m: int = 0) -> DensityProfile:
    """Analytic densities at the given offsets packaged as a profile.

    ``m`` is the position of offset 0 within ``offsets`` when they are a
    contiguous site range; pass ``m = 0`` for bare offset lists.
    """
    n = np.array([density(i, t, rates, g, mode) for i in offsets])
    return DensityProfile(t=float(t), n=n, m=m)


def _cosh(u: float) -> float:
    # integrands below vanish like 1/cosh^2 or faster; cap to avoid overflow
    return math.cosh(u) if u < 100.0 else math.inf


def _check_nu(nu):
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu}")


def scaling_function(nu: float, rates: LindbladRates, g: float) -> float:
    """Late-time scaling form ``Phi(nu)`` of ``n_i(t)``, ``nu = |i| / (2 g t)``.

    Adaptive quadrature of

        Phi(nu) = (4 Gamma_G g / pi) int_1^{1/nu} dz / (sqrt(z^2 - 1) (2 g + z G')^2)

    on ``z = cosh(u)``, which removes the endpoint singularity.
    """
    _check_nu(nu)
    a, b = 2.0 * g, rates.gamma_prime
    top = math.acosh(1.0 / nu)
    val = _quad(lambda u: 1.0 / (a + b * math.cosh(u)) ** 2, 0.0, top, epsrel=1e-12, epsabs=0.0)
    return 4.0 * rates.gamma_G * g / math.pi * val


def scaling_function_closed(nu: float, rates: LindbladRates, g: float) -> float:
    """Closed form of :func:`scaling_function`.

    ``Phi = (2 Gamma_G g~ / (pi G')) K(nu)`` with

        K = [g~ (1 + nu g~) (log(1 + nu g~) - log(g~ + nu - R)) - R] / ((g~^2 - 1)^{3/2} (1 + nu g~)),
        R = sqrt((g~^2 - 1)(1 - nu^2)).

    Evaluated in complex arithmetic so that ``g~ < 1`` needs no separate
    branch; ``g~ = 1`` is a removable singularity handed to quadrature.
    """
    _check_nu(nu)
    gt = rates_g_tilde(rates, g)
    if abs(gt - 1.0) < 1e-4:
        return scaling_function(nu, rates, g)
    w = np.sqrt(complex(gt * gt - 1.0))
    R = w * math.sqrt(1.0 - nu * nu)
    q = 1.0 + nu * gt
    K = (gt * q * (np.log(q) - np.log(gt + nu - R)) - R) / (w**3 * q)
    return float(2.0 * rates.gamma_G * gt / (math.pi * rates.gamma_prime) * K.real)


def scaling_function_drop(nu: float, rates: LindbladRates, g: float) -> float:
    """``Phi(0) - Phi(nu)`` computed directly as the tail of the defining integral."""
    if not 0.0 <= nu < 1.0:
        raise DomainError(f"nu must lie in [0, 1), got {nu}")
    if nu == 0.0:
        return 0.0
    a, b = 2.0 * g, rates.gamma_prime
    val = _quad(lambda u: 1.0 / (a + b * _cosh(u)) ** 2, math.acosh(1.0 / nu), np.inf, epsrel=1e-12, epsabs=0.0)
    return 4.0 * rates.gamma_G * g / math.pi * val


def scaling_function_small_nu(nu: float, rates: LindbladRates, g: float) -> float:
    """``Phi(0) - (2 Gamma_G g / (pi G'^2)) nu^2``, the parabolic top of the profile.

    Taylor expansion about ``nu = 0``; its range is ``nu << 1 / g~``.
    """
    a, b = 2.0 * g, rates.gamma_prime
    phi0 = _quad(lambda u: 1.0 / (a + b * _cosh(u)) ** 2, 0.0, np.inf, epsrel=1e-12, epsabs=0.0)
    phi0 *= 4.0 * rates.gamma_G * g / math.pi
    return phi0 - 2.0 * rates.gamma_G * g / (math.pi * b * b) * nu * nu


def scaling_function_edge(nu: float, rates: LindbladRates, g: float) -> float:
    """Square-root vanishing at the front: ``(2 Gamma_G g~ / (pi G')) sqrt(2 (1 - nu)) / (1 + g~)^2``."""
    gt, gp = rates_g_tilde(rates, g), rates.gamma_prime
    return 2.0 * rates.gamma_G * gt / (math.pi * gp) * math.sqrt(2.0 * (1.0 - nu)) / (1.0 + gt) ** 2


def rates_g_tilde(rates: LindbladRates, g: float) -> float:
    return 2.0 * g / rates.gamma_prime


def _arc_ratio(c: float) -> float:
    """``arccos(c) / sqrt(1 - c^2)`` continued to ``c > 1`` as ``arccosh(c) / sqrt(c^2 - 1)``."""
    if c < 1.0:
        return math.acos(c) / math.sqrt(1.0 - c * c)
    if c == 1.0:
        return 1.0
    return math.log(c + math.sqrt(c * c - 1.0)) / math.sqrt(c * c - 1.0)


def total_rate_quadrature(rates: LindbladRates, g: float) -> float:
    """``dN/dt = (16 Gamma_G g^2 / pi) int_1^inf dz / (z sqrt(z^2 - 1) (2 g + z G')^2)``."""
    a, b = 2.0 * g, rates.gamma_prime
    val = _quad(
        lambda u: 1.0 / (_cosh(u) * (a + b * _cosh(u)) ** 2),
        0.0,
        np.inf,
        epsrel=1e-13,
        epsabs=0.0,
    )
    return 16.0 * rates.gamma_G * g * g / math.pi * val


def total_rate(rates: LindbladRates, g: float) -> float:
    """Late-time growth rate ``dN/dt`` of the total occupation.

    Closed form in ``c = g~`` with ``A(c) = arccos(c) / sqrt(1 - c^2)``:

        dN/dt = (4 Gamma_G / pi) [pi/2 - 2 A(c) + (A(c) - c) / (1 - c^2)]

    ``A`` is real for every ``c > 0``. The last term is 0/0 at ``c = 1``, so a
    narrow window around it is handed to quadrature.
    """
    c = rates_g_tilde(rates, g)
    if not c > 0:
        raise DomainError("g_tilde must be positive")
    if abs(c - 1.0) < 1e-3:
        return total_rate_quadrature(rates, g)
    A = _arc_ratio(c)
    return 4.0 * rates.gamma_G / math.pi * (0.5 * math.pi - 2.0 * A + (A - c) / (1.0 - c * c))


def total_rate_small(rates: LindbladRates, g: float) -> float:
    """``Gamma_G (g~^2 - 16 g~^3 / (3 pi))`` for ``g~ << 1``."""
    c = rates_g_tilde(rates, g)
    return rates.gamma_G * (c * c - 16.0 * c**3 / (3.0 * math.pi))


def total_rate_large(rates: LindbladRates, g: float) -> float:
    """``2 Gamma_G (1 - (4 log(2 g~) - 2) / (pi g~))``, leading terms for ``g~ >> 1``."""
    c = rates_g_tilde(rates, g)
    return 2.0 * rates.gamma_G * (1.0 - (4.0 * math.log(2.0 * c) - 2.0) / (math.pi * c))


def evolve_lindblad(spec: SetupSpec, rates: LindbladRates, times, detailed_balance: bool = True):
    """Integrate the local Lindblad correlation equation on the finite lattice.

    ``dC_ij/dt = i g (C_{i-1,j} - C_{i,j+1} + C_{i+1,j} - C_{i,j-1})
    + r (delta_im + delta_jm) C_ij + 2 Gamma_G delta_im delta_jm``

    with ``r = -G'`` under detailed balance. With ``detailed_balance=False``
    the loss channel is dropped and ``r = +Gamma_G`` for bosons (stimulated
    gain) or ``-Gamma_G`` for fermions (Pauli blocking).

    Returns a :class:`DensityProfile` for scalar ``times`` and a list otherwise.
    """
    scalar = np.ndim(times) == 0
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(ts < 0) or np.any(np.diff(ts) <= 0):
        raise ValueError("times must be non-negative and strictly increasing")
    L, m0 = spec.L, spec.m - 1
    reach = min(m0, L - 1 - m0)
    if 2.0 * spec.g * ts[-1] >= reach - 1:
        warnings.warn(
            f"ballistic front 2 g t = {2.0 * spec.g * ts[-1]:.3g} reaches the lattice edge "
            f"({reach} sites from the injection site); enlarge L",
            RuntimeWarning,
            stacklevel=2,
        )
    if detailed_balance:
        site_rate = -rates.gamma_prime
    elif spec.statistics is ParticleStatistics.BOSON:
        site_rate = rates.gamma_G
    else:
        site_rate = -rates.gamma_G
    source = 2.0 * rates.gamma_G
    buf = np.empty((L, L), dtype=complex)

    def rhs(_, y):
        kernels.lindblad_rhs(y.reshape(L, L), spec.g, m0, site_rate, source, buf)
        return buf.ravel().copy()

    y0 = np.zeros(L * L, dtype=complex)
    out = []
    if ts[-1] > 0:
        sol = solve_ivp(rhs, (0.0, ts[-1]), y0, method="DOP853", t_eval=ts, rtol=1e-10, atol=1e-14)
        if not sol.success:
            raise RuntimeError(f"Lindblad integration failed: {sol.message}")
        ys = sol.y
    else:
        ys = y0[:, None]
    for k, t in enumerate(ts):
        c = ys[:, k].reshape(L, L)
        out.append(DensityProfile(t=float(t), n=np.real(np.diag(c)).copy(), m=spec.m))
    return out[0] if scalar else out
