"""Setup parameters, single-particle Hamiltonians, bath data and special functions.

Energies are dimensionless with hbar = k_B = 1. Site indices in public
interfaces are 1-based (lattice sites 1..L); arrays are 0-based internally.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import kernels


class DomainError(ValueError):
    """Raised when a function is evaluated outside its domain of definition."""


class ParticleStatistics(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def sign(self) -> int:
        """+1 for bosons, -1 for fermions (the sign in ``1 +/- n``)."""
        return 1 if self is ParticleStatistics.BOSON else -1

    @classmethod
    def parse(cls, value) -> "ParticleStatistics":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"statistics must be 'boson' or 'fermion', got {value!r}") from None


@dataclass(frozen=True)
class SetupSpec:
    """Physical parameters of lattice, bath, coupling and particle statistics.

    Attributes
    ----------
    L : int
        Number of lattice sites.
    L_B : int
        Number of bath sites kept in the finite truncation (exact method only).
    g : float
        Lattice hopping.
    t_B : float
        Bath hopping.
    gamma : float
        Lattice-bath coupling.
    m : int
        Injection site, 1-based.
    beta, mu : float
        Inverse temperature and chemical potential of the bath.
    statistics : ParticleStatistics
    """

    L: int
    L_B: int
    g: float
    t_B: float
    gamma: float
    m: int
    beta: float
    mu: float
    statistics: ParticleStatistics = field(default=ParticleStatistics.BOSON)

    def __post_init__(self):
        object.__setattr__(self, "statistics", ParticleStatistics.parse(self.statistics))
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L}")
        if int(self.L_B) != self.L_B or self.L_B < 1:
            raise ValueError(f"L_B must be a positive integer, got {self.L_B}")
        if not self.t_B > 0:
            raise ValueError(f"t_B must be positive, got {self.t_B}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if int(self.m) != self.m or not 1 <= self.m <= self.L:
            raise ValueError(f"injection site m must lie in [1, {self.L}], got {self.m}")
        if self.statistics is ParticleStatistics.BOSON and not self.mu < -2.0 * self.t_B:
            raise DomainError(
                f"bosonic bath needs mu < -2 t_B = {-2.0 * self.t_B} so that the Bose "
                f"function is finite over the band, got mu = {self.mu}"
            )
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "L_B", int(self.L_B))
        object.__setattr__(self, "m", int(self.m))

    def replace(self, **changes) -> "SetupSpec":
        data = self.to_dict()
        data.update(changes)
        return SetupSpec.from_dict(data)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["statistics"] = self.statistics.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SetupSpec":
        names = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - names
        missing = names - set(data)
        if unknown:
            raise ValueError(f"unknown SetupSpec keys: {sorted(unknown)}")
        if missing:
            raise ValueError(f"missing SetupSpec keys: {sorted(missing)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text_or_path) -> "SetupSpec":
        """Parse a JSON document (string or path) whose keys are the field names."""
        if isinstance(text_or_path, Path) or (
            isinstance(text_or_path, str) and not text_or_path.lstrip().startswith("{")
        ):
            text_or_path = Path(text_or_path).read_text()
        return cls.from_dict(json.loads(text_or_path))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class BathModes:
    eigenvalues: np.ndarray
    transform: np.ndarray


@dataclass(frozen=True)
class SingleParticleHamiltonian:
    dim: int
    matrix: np.ndarray


@dataclass(frozen=True)
class DensityProfile:
    """Site occupations ``n`` (sites 1..len(n)) at time ``t``.

    ``m`` is the 1-based injection site, used to convert sites to offsets.
    ``t = inf`` marks a steady state.
    """

    t: float
    n: np.ndarray
    m: int

    @property
    def N(self) -> float:
        return float(np.sum(self.n))

    def offsets(self) -> np.ndarray:
        return np.arange(1, len(self.n) + 1) - self.m


@dataclass(frozen=True)
class OccupationSeries:
    times: np.ndarray
    N: np.ndarray
    label: str = ""


def occupation(omega, beta, mu, statistics):
    """Bose or Fermi function ``1 / (exp(beta (omega - mu)) -/+ 1)``.

    Accepts scalars or arrays. Bosons require ``omega > mu`` everywhere.
    """
    statistics = ParticleStatistics.parse(statistics)
    w = np.asarray(omega, dtype=float)
    x = beta * (w - mu)
    if statistics is ParticleStatistics.BOSON:
        if np.any(x <= 0):
            raise DomainError("Bose function undefined for omega <= mu")
        val = 1.0 / np.expm1(x)
    else:
        # 1 / (e^x + 1) written to avoid overflow for large |x|
        val = np.where(x > 0, np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))),
                       1.0 / (1.0 + np.exp(-np.abs(x))))
    return float(val) if np.ndim(val) == 0 else val


def spectral_density(omega, gamma, t_B):
    """Semicircular bath spectral density of a semi-infinite tight-binding chain."""
    a = 2.0 * t_B
    d = np.abs(np.asarray(omega, dtype=float))
    # factored to avoid cancellation at the band edges
    inside = np.clip((a - d) * (a + d), 0.0, None)
    val = (gamma**2 / t_B**2) * np.sqrt(inside)
    return float(val) if np.ndim(val) == 0 else val


def chain_hamiltonian(n: int, hopping: float) -> np.ndarray:
    """Open nearest-neighbour chain of ``n`` sites."""
    h = np.zeros((n, n))
    if n > 1:
        idx = np.arange(n - 1)
        h[idx, idx + 1] = hopping
        h[idx + 1, idx] = hopping
    return h


def system_hamiltonian(spec: SetupSpec) -> np.ndarray:
    return chain_hamiltonian(spec.L, spec.g)


def build_full_hamiltonian(spec: SetupSpec) -> SingleParticleHamiltonian:
    """Lattice + bath single-particle Hamiltonian, lattice sites first.

    The only lattice-bath bond joins lattice site ``m`` and bath site 1
    (matrix indices ``m - 1`` and ``L``).
    """
    L, LB = spec.L, spec.L_B
    dim = L + LB
    h = np.zeros((dim, dim))
    h[:L, :L] = chain_hamiltonian(L, spec.g)
    h[L:, L:] = chain_hamiltonian(LB, spec.t_B)
    h[spec.m - 1, L] = h[L, spec.m - 1] = spec.gamma
    return SingleParticleHamiltonian(dim=dim, matrix=h)


def bath_normal_modes(L_B: int, t_B: float) -> BathModes:
    """Normal modes of the ``L_B``-site open bath chain, eigenvalues ascending."""
    if L_B < 1:
        raise ValueError("L_B must be >= 1")
    diag = np.zeros(L_B)
    off = np.full(L_B - 1, float(t_B))
    if L_B == 1:
        return BathModes(eigenvalues=np.zeros(1), transform=np.ones((1, 1)))
    w, u = eigh_tridiagonal(diag, off)
    return BathModes(eigenvalues=w, transform=u)


def bessel_j(order: int, x):
    """Integer-order Bessel function J_order(x), scalar or array ``x``.

    Normalised Miller downward recurrence (compiled when available); stable
    for orders in the hundreds and arguments well beyond the order.
    """
    if int(order) != order or order < 0:
        raise ValueError(f"order must be a non-negative integer, got {order}")
    if np.ndim(x) == 0:
        return kernels.bessel_jn(int(order), float(x))
    return kernels.bessel_jn_array(int(order), np.asarray(x, dtype=float))


def _zeta(z: float) -> float:
    """Variable of the uniform (Airy-type) expansion of J_mu(mu z)."""
    if z <= 1.0:
        s = math.sqrt(1.0 - z * z)
        return (1.5 * (math.log((1.0 + s) / z) - s)) ** (2.0 / 3.0)
    s = math.sqrt(z * z - 1.0)
    return -((1.5 * (s - math.acos(1.0 / z))) ** (2.0 / 3.0))


def bessel_j_uniform(mu: float, z: float) -> float:
    """Leading uniform asymptotic form of J_mu(mu z) for large order ``mu``.

    Exponentially decaying for z < 1 and oscillatory for z > 1; not valid in
    the transition layer ``|z - 1| <~ mu**(-2/3)``.
    """
    if z <= 0 or z == 1.0:
        raise DomainError("uniform form needs z > 0 and z != 1")
    zeta = _zeta(z)
    pref = (4.0 * zeta / (1.0 - z * z)) ** 0.25 / (2.0 * math.sqrt(mu * math.pi)) / abs(zeta) ** 0.25
    if z < 1.0:
        tail = math.exp(-(2.0 / 3.0) * mu * zeta**1.5)
    else:
        tail = 2.0 * math.cos((2.0 / 3.0) * mu * (-zeta) ** 1.5 - math.pi / 4.0)
    return pref * tail


def bessel_zeros_mcmahon(order: int, upto: float) -> np.ndarray:
    """McMahon estimates of the positive zeros of J_order below ``upto``.

    Accurate to a small fraction of the zero spacing once the zero index
    exceeds the order; good enough for quadrature breakpoints.
    """
    mu4 = 4.0 * order * order
    out = []
    s = 1
    while True:
        b = (s + order / 2.0 - 0.25) * math.pi
        j = b - (mu4 - 1.0) / (8.0 * b) - 4.0 * (mu4 - 1.0) * (7.0 * mu4 - 31.0) / (3.0 * (8.0 * b) ** 3)
        if j >= upto:
            break
        if j > order:
            out.append(j)
        s += 1
    return np.array(out)
