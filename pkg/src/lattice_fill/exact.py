"""Exact propagation of the full lattice + bath correlation matrix.

The whole setup is quadratic, so ``S_ij = <d_i^dag d_j>`` obeys
``S(t) = exp(i h t) S(0) exp(-i h t)`` for bosons and fermions alike. The
single-particle Hamiltonian is diagonalised once; every snapshot is then a
phase rotation in the eigenbasis.
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    BathModes,
    DensityProfile,
    OccupationSeries,
    SetupSpec,
    bath_normal_modes,
    build_full_hamiltonian,
    occupation,
)


class CorrelationMatrix:
    """Hermitian matrix of two-point correlations ``<d_i^dag d_j>``."""

    def __init__(self, data):
        data = np.asarray(data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError("correlation matrix must be square")
        self.data = data

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T))) if self.dim else 0.0

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.data)).copy()


@dataclass(frozen=True)
class Propagator:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_hamiltonian(cls, h) -> "Propagator":
        matrix = getattr(h, "matrix", h)
        w, v = scipy.linalg.eigh(matrix, driver="evr")
        return cls(eigenvalues=w, eigenvectors=v)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    def unitary(self, t: float) -> np.ndarray:
        """``exp(i h t)``."""
        v = self.eigenvectors
        return (v * np.exp(1j * self.eigenvalues * t)) @ v.T


def initial_correlation(spec: SetupSpec, modes: BathModes) -> CorrelationMatrix:
    """Empty lattice next to a thermal bath: only the bath block is nonzero."""
    if modes.eigenvalues.shape[0] != spec.L_B:
        raise ValueError("bath modes do not match L_B")
    nbar = occupation(modes.eigenvalues, spec.beta, spec.mu, spec.statistics)
    u = modes.transform
    dim = spec.L + spec.L_B
    s0 = np.zeros((dim, dim), dtype=complex)
    s0[spec.L:, spec.L:] = (u * nbar) @ u.T
    return CorrelationMatrix(s0)


def propagate(s0: CorrelationMatrix, prop: Propagator, t: float) -> CorrelationMatrix:
    """``exp(i h t) S(0) exp(-i h t)`` through the cached eigendecomposition."""
    if s0.dim != prop.eigenvalues.shape[0]:
        raise ValueError(f"dimension mismatch: S0 is {s0.dim}, propagator is {prop.eigenvalues.shape[0]}")
    if t == 0:
        return CorrelationMatrix(s0.data.copy())
    v = prop.eigenvectors
    phase = np.exp(1j * prop.eigenvalues * t)
    # rotate into the eigenbasis, apply phases, rotate back
    s_eig = v.T @ s0.data @ v
    s_eig = phase[:, None] * s_eig * phase.conj()[None, :]
    return CorrelationMatrix(v @ s_eig @ v.T)


def density_profile(s: CorrelationMatrix, L: int, m: int = 1, t: float = float("nan")) -> DensityProfile:
    """Lattice occupations ``n_i = Re S_ii`` for i = 1..L."""
    if s.dim < L:
        raise ValueError("correlation matrix smaller than the lattice")
    return DensityProfile(t=t, n=np.real(np.diag(s.data)[:L]).copy(), m=m)


def recurrence_time(spec: SetupSpec) -> float:
    """Time after which the disturbance reflected at the far bath end returns.

    Signals leave bath site 1 at speed at most ``2 t_B`` and must travel
    ``2 L_B`` sites before reaching the lattice again.
    """
    return spec.L_B / spec.t_B


@functools.lru_cache(maxsize=2)
def _diagonalised(L, L_B, g, t_B, gamma, m):
    spec = SetupSpec(L=L, L_B=L_B, g=g, t_B=t_B, gamma=gamma, m=m, beta=1.0, mu=-3.0 * t_B)
    prop = Propagator.from_hamiltonian(build_full_hamiltonian(spec))
    modes = bath_normal_modes(L_B, t_B)
    # overlap of full eigenvectors with bath normal modes, (L + L_B) x L_B
    overlap = prop.eigenvectors[L:, :].T @ modes.transform
    return prop, modes, overlap


class ExactDynamics:
    """Lattice observables of the exact finite-bath dynamics.

    Specialises ``propagate`` to the thermal initial condition: with
    ``B(t) = P_sys(t) U`` (``P = exp(i h t)`` restricted to lattice rows,
    ``U`` the bath modes) the lattice block is ``B diag(nbar) B^dag``. Each
    snapshot costs O(L (L + L_B) L_B) instead of O((L + L_B)^3).
    """

    def __init__(self, spec: SetupSpec):
        self.spec = spec
        self.prop, self.modes, self._overlap = _diagonalised(
            spec.L, spec.L_B, float(spec.g), float(spec.t_B), float(spec.gamma), spec.m
        )
        self.nbar = occupation(self.modes.eigenvalues, spec.beta, spec.mu, spec.statistics)

    def check_times(self, times) -> None:
        t_max = float(np.max(times)) if np.size(times) else 0.0
        if t_max >= recurrence_time(self.spec):
            warnings.warn(
                f"t_max = {t_max} reaches the finite-bath recurrence time "
                f"{recurrence_time(self.spec)}; increase L_B",
                RuntimeWarning,
                stacklevel=3,
            )

    def _rotated(self, t: float):
        L = self.spec.L
        v_sys = self.prop.eigenvectors[:L, :]
        arg = self.prop.eigenvalues * t
        re = (v_sys * np.cos(arg)) @ self._overlap
        im = (v_sys * np.sin(arg)) @ self._overlap
        return re, im

    def profile(self, t: float) -> DensityProfile:
        if t == 0:
            return DensityProfile(t=0.0, n=np.zeros(self.spec.L), m=self.spec.m)
        re, im = self._rotated(t)
        n = (re**2 + im**2) @ self.nbar
        return DensityProfile(t=float(t), n=n, m=self.spec.m)

    def profiles(self, times) -> list[DensityProfile]:
        times = np.asarray(times, dtype=float)
        self.check_times(times)
        return [self.profile(t) for t in times]

    def system_block(self, t: float) -> np.ndarray:
        """Full L x L lattice correlation block at time ``t``."""
        re, im = self._rotated(t)
        b = re + 1j * im
        return (b * self.nbar) @ b.conj().T

    def total(self, times) -> OccupationSeries:
        times = np.asarray(times, dtype=float)
        return OccupationSeries(times=times, N=np.array([p.N for p in self.profiles(times)]), label="exact")
