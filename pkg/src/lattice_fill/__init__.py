"""Filling an empty tight-binding lattice from a locally attached thermal bath.

Four routes to the lattice occupations are provided: exact propagation of the
full correlation matrix (:mod:`lattice_fill.exact`), the Redfield equation
(:mod:`lattice_fill.redfield`), the local Lindblad equation and its analytic
solutions (:mod:`lattice_fill.lindblad`), and the Green's-function steady state
(:mod:`lattice_fill.langevin`). :mod:`lattice_fill.harness` runs named
experiments, fits and exports them.
"""

from .core import (
    BathModes,
    DensityProfile,
    DomainError,
    OccupationSeries,
    ParticleStatistics,
    SetupSpec,
    SingleParticleHamiltonian,
    bath_normal_modes,
    bessel_j,
    build_full_hamiltonian,
    occupation,
    spectral_density,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BathModes",
    "DensityProfile",
    "DomainError",
    "OccupationSeries",
    "ParticleStatistics",
    "SetupSpec",
    "SingleParticleHamiltonian",
    "bath_normal_modes",
    "bessel_j",
    "build_full_hamiltonian",
    "occupation",
    "spectral_density",
]
