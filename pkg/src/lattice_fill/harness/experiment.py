"""Named experiment recipes and the runner that evaluates them."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import exact, langevin, lindblad, redfield
from ..core import DensityProfile, ParticleStatistics, SetupSpec

log = logging.getLogger(__name__)

METHODS = ("exact", "redfield", "lindblad", "langevin")

DEFAULTS = dict(L_B=4096, t_B=1.0, beta=1.0, mu=-2.01, statistics="boson")


def _spec(**kw) -> SetupSpec:
    return SetupSpec.from_dict({**DEFAULTS, **kw})


def _grid(*parts) -> tuple[float, ...]:
    return tuple(float(x) for x in np.unique(np.round(np.concatenate(parts), 10)))


# early linear regime sampled finely, relaxation tail on a geometric grid
_FILL_TIMES = _grid(np.arange(0.0, 200.0, 2.5), np.geomspace(200.0, 4000.0, 60))


@dataclass(frozen=True)
class ExperimentConfig:
    recipe: str
    spec: SetupSpec
    times: tuple[float, ...]
    methods: tuple[str, ...]
    output_dir: Path = Path(".")
    profile_times: tuple[float, ...] = ()
    sizes: tuple[int, ...] = ()
    statistics: tuple[str, ...] = ()

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size and (np.any(t < 0) or np.any(np.diff(t) <= 0)):
            raise ValueError("times must be non-negative and strictly increasing")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}; choose from {METHODS}")
        if self.recipe not in RECIPES:
            raise ValueError(f"unknown recipe {self.recipe!r}; choose from {sorted(RECIPES)}")


RECIPES: dict[str, dict] = {
    "fig2": dict(
        spec=dict(L=40, g=0.5, gamma=1.0, m=21),
        times=_FILL_TIMES,
        methods=("exact", "langevin"),
        description="total occupation N(t), L=40, gamma=1: early linear growth and relaxation",
    ),
    "fig3": dict(
        spec=dict(L=40, g=0.5, gamma=1.0, m=21),
        times=_FILL_TIMES,
        methods=("exact", "langevin"),
        sizes=(16, 20, 40),
        description="N(t) for several lattice sizes: shared early slope, size-dependent relaxation",
    ),
    "fig4": dict(
        spec=dict(L=20, g=0.5, gamma=1.0, m=11),
        times=(400.0, 2000.0, 4000.0),
        profile_times=(400.0, 2000.0, 4000.0),
        methods=("exact", "langevin"),
        description="long-time density profile against the Green's-function steady state, L=20",
    ),
    "fig5": dict(
        spec=dict(L=100, g=0.25, gamma=1.0, m=51),
        times=(20.0, 50.0, 80.0),
        profile_times=(20.0, 50.0, 80.0),
        methods=("exact",),
        description="ballistic spreading of the density front, L=100",
    ),
    "fig4a": dict(
        spec=dict(L=21, g=0.5, gamma=0.01, m=11),
        times=_grid(np.linspace(0.0, 1000.0, 21), np.linspace(1000.0, 4000.0, 13)),
        profile_times=(400.0, 4000.0),
        methods=("exact", "redfield"),
        description="weak coupling: Redfield against exact dynamics, L=21, gamma=0.01",
    ),
    "fig8": dict(
        spec=dict(L=41, g=0.05, gamma=0.01, m=21),
        times=_grid(np.linspace(0.0, 180.0, 19)),
        profile_times=(90.0, 180.0),
        methods=("exact", "lindblad"),
        description="weak coupling and weak hopping: local Lindblad against exact dynamics, L=41",
    ),
    "fig10": dict(
        spec=dict(L=41, g=0.05, gamma=0.01, m=21),
        times=(90.0, 180.0),
        profile_times=(90.0, 180.0),
        methods=("lindblad",),
        description="ballistic scaling collapse of local Lindblad profiles",
    ),
    "compare_fb": dict(
        spec=dict(L=40, g=0.5, gamma=1.0, m=21),
        times=_grid(np.arange(0.0, 100.0, 2.5), np.geomspace(100.0, 4000.0, 30)),
        methods=("exact",),
        statistics=("boson", "fermion"),
        description="bosons against fermions at equal parameters",
    ),
    "custom": dict(
        spec=dict(L=20, g=0.5, gamma=1.0, m=11),
        times=(0.0, 10.0, 50.0, 100.0),
        methods=("exact",),
        description="user-supplied parameters",
    ),
}


def make_config(recipe: str, overrides: dict | None = None, **fields) -> ExperimentConfig:
    """Recipe defaults with spec ``overrides`` and config ``fields`` applied."""
    if recipe not in RECIPES:
        raise ValueError(f"unknown recipe {recipe!r}; choose from {sorted(RECIPES)}")
    r = RECIPES[recipe]
    spec = _spec(**{**r["spec"], **(overrides or {})})
    kw = dict(
        recipe=recipe,
        spec=spec,
        times=tuple(r["times"]),
        methods=tuple(r["methods"]),
        profile_times=tuple(r.get("profile_times", ())),
        sizes=tuple(r.get("sizes", ())),
        statistics=tuple(r.get("statistics", ())),
    )
    kw.update({k: v for k, v in fields.items() if v is not None})
    for key in ("times", "methods", "profile_times", "sizes", "statistics"):
        kw[key] = tuple(kw[key])
    return ExperimentConfig(**kw)


@dataclass
class Series:
    method: str
    label: str
    times: np.ndarray
    N: np.ndarray


@dataclass
class ProfileRecord:
    method: str
    label: str
    profile: DensityProfile


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    series: list[Series] = field(default_factory=list)
    profiles: list[ProfileRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def get_series(self, method: str, label: str = "") -> Series:
        for s in self.series:
            if s.method == method and s.label == label:
                return s
        raise KeyError(f"no series for method={method!r} label={label!r}")

    def get_profiles(self, method: str, label: str = "") -> list[DensityProfile]:
        return [p.profile for p in self.profiles if p.method == method and p.label == label]

    def is_empty(self) -> bool:
        return not self.series and not self.profiles


def _variants(config: ExperimentConfig):
    """(label, spec) pairs: one per lattice size or statistics, else the spec itself."""
    if config.sizes:
        for L in config.sizes:
            yield f"L={L}", config.spec.replace(L=L, m=L // 2 + 1)
    elif config.statistics:
        for st in config.statistics:
            yield st, config.spec.replace(statistics=ParticleStatistics.parse(st).value)
    else:
        yield "", config.spec


def _warn_validity(method: str, spec: SetupSpec) -> None:
    if method in ("redfield", "lindblad") and spec.gamma > 0.1:
        warnings.warn(f"{method} assumes weak coupling; gamma = {spec.gamma}", RuntimeWarning, stacklevel=3)
    if method == "lindblad" and spec.g > 0.1:
        warnings.warn(f"local Lindblad assumes weak hopping; g = {spec.g}", RuntimeWarning, stacklevel=3)


def _run_one(method: str, label: str, spec: SetupSpec, config: ExperimentConfig, result: ExperimentResult):
    times = np.asarray(config.times, dtype=float)
    ptimes = list(config.profile_times)
    _warn_validity(method, spec)
    if method == "exact":
        dyn = exact.ExactDynamics(spec)
        dyn.check_times(times)
        snaps = {float(t): dyn.profile(t) for t in np.union1d(times, ptimes)}
        result.series.append(Series(method, label, times, np.array([snaps[float(t)].N for t in times])))
        result.profiles += [ProfileRecord(method, label, snaps[float(t)]) for t in ptimes]
    elif method == "langevin":
        ss = langevin.steady_density(spec)
        result.series.append(Series(method, label, np.array([math.inf]), np.array([ss.N])))
        result.profiles.append(ProfileRecord(method, label, DensityProfile(t=math.inf, n=ss.n, m=spec.m)))
        result.meta.setdefault("N_SS", {})[label] = ss.N
    elif method == "redfield":
        dyn = redfield.RedfieldDynamics(spec)
        result.series.append(Series(method, label, times, dyn.total(times).N))
        result.profiles += [ProfileRecord(method, label, dyn.profile(t)) for t in ptimes]
        result.meta.setdefault("early_slope", {})[label] = redfield.early_slope(dyn.modes, spec)
    elif method == "lindblad":
        rates = lindblad.rates(spec)
        result.meta.setdefault("rates", {})[label] = rates
        result.meta.setdefault("total_rate", {})[label] = lindblad.total_rate(rates, spec.g)
        grid = np.union1d(times, ptimes)
        grid = grid[grid > 0]
        ode = lindblad.evolve_lindblad(spec, rates, grid) if grid.size else []
        by_t = {p.t: p for p in ode}
        N = np.array([by_t[float(t)].N if t > 0 else 0.0 for t in times])
        result.series.append(Series(method, label, times, N))
        result.profiles += [ProfileRecord(method, label, by_t[float(t)]) for t in ptimes if t > 0]
        # analytic densities on the lattice sites, mirrored about the injection site
        offsets = np.arange(1, spec.L + 1) - spec.m
        for t in ptimes:
            cache: dict[int, float] = {}
            n = np.array([cache.setdefault(abs(int(i)), lindblad.density(int(i), t, rates, spec.g)) for i in offsets])
            result.profiles.append(ProfileRecord("lindblad", "analytic" + (f" {label}" if label else ""), DensityProfile(float(t), n, spec.m)))
    else:  # pragma: no cover - guarded by ExperimentConfig
        raise ValueError(method)


def run(config: ExperimentConfig) -> ExperimentResult:
    """Evaluate every requested method for every variant of ``config``."""
    result = ExperimentResult(config=config)
    for label, spec in _variants(config):
        for method in config.methods:
            log.info("recipe %s: %s %s", config.recipe, method, label or spec.to_json())
            try:
                _run_one(method, label, spec, config, result)
            except Exception as exc:
                raise RuntimeError(f"{method} failed for {config.recipe} {label or ''} ({spec.to_json()}): {exc}") from exc
    return result
