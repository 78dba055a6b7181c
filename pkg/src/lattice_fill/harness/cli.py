"""Command line entry point ``lattice-fill``.

Subcommands
-----------
run       evaluate a recipe, export CSV/SVG and its checks report
check     evaluate one or more recipes and report their checks only
fit       fit a model to an exported ``*_N_vs_t.csv``
collapse  scaling-collapse spread of an exported ``*_profiles.csv``

``run`` and ``check`` exit with status 0 only if every recipe-level check
passes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ..core import DensityProfile, OccupationSeries
from . import analysis, checks
from .experiment import RECIPES, make_config, run
from .export import export, read_csv


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _methods(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.replace(",", " ").split())


def _load_overrides(path) -> dict:
    if path is None:
        return {}
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise SystemExit("--config must hold a JSON object of SetupSpec fields")
    return data


def _config(args, recipe):
    return make_config(
        recipe,
        _load_overrides(args.config),
        times=args.times,
        methods=args.methods,
        profile_times=args.profile_times,
        output_dir=Path(args.out),
    )


def _add_run_flags(p):
    p.add_argument("--config", help="JSON file with SetupSpec fields overriding the recipe defaults")
    p.add_argument("--methods", type=_methods, help="comma-separated subset of exact,redfield,lindblad,langevin")
    p.add_argument("--times", type=_floats, help="comma-separated snapshot times")
    p.add_argument("--profile-times", type=_floats, help="comma-separated times at which profiles are stored")
    p.add_argument("--out", default=".", help="output directory")


def _emit_report(rep: dict, out: Path, name: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(json.dumps(rep, indent=2, sort_keys=True) + "\n")


def cmd_run(args) -> int:
    cfg = _config(args, args.recipe)
    res = run(cfg)
    for path in export(res, cfg.output_dir):
        print(path)
    if args.no_check:
        return 0
    cs = checks.check_result(res)
    for c in cs:
        print(c.line())
    rep = checks.report(cs)
    _emit_report(rep, cfg.output_dir, f"{cfg.recipe}_checks.json")
    return 0 if rep["passed"] else 1


def cmd_check(args) -> int:
    names = args.recipe or [r for r in RECIPES if r != "custom"]
    full = {"passed": True, "recipes": {}}
    for name in names:
        res = run(_config(args, name))
        cs = checks.check_result(res)
        for c in cs:
            print(c.line())
        rep = checks.report(cs)
        full["recipes"][name] = rep
        full["passed"] &= rep["passed"]
    _emit_report(full, Path(args.out), "checks.json")
    print(json.dumps({"passed": full["passed"]}))
    return 0 if full["passed"] else 1


def _series_from_csv(path, method, label) -> OccupationSeries:
    cols = read_csv(path)
    sel = [k for k, (m, lab) in enumerate(zip(cols["method"], cols["label"])) if m == method and lab == label]
    if not sel:
        raise SystemExit(f"no rows for method={method!r} label={label!r} in {path}")
    t = np.array([cols["t"][k] for k in sel])
    N = np.array([cols["N"][k] for k in sel])
    return OccupationSeries(times=t, N=N, label=method)


def cmd_fit(args) -> int:
    series = _series_from_csv(args.input, args.method, args.label)
    if args.model == "exp_relax" and args.window is None:
        res = analysis.relaxation_time(series, args.nss)
    else:
        if args.window is None:
            raise SystemExit("--window is required for this model")
        res = analysis.fit(series, args.model, tuple(args.window), N_SS=args.nss)
    out = {"model": res.model, "params": res.params, "residual": res.residual, "window": list(res.window)}
    if res.model == "exp_relax":
        out["t_SS"] = 1.0 / res.params["d"]
    print(json.dumps(out, indent=2))
    return 0


def cmd_collapse(args) -> int:
    cols = read_csv(args.input)
    groups: dict[float, list[int]] = {}
    for k, (m, lab) in enumerate(zip(cols["method"], cols["label"])):
        if m == args.method and lab == args.label:
            groups.setdefault(cols["t"][k], []).append(k)
    profiles = []
    for t, rows in sorted(groups.items()):
        rows.sort(key=lambda k: cols["site_index"][k])
        n = np.array([cols["n_i"][k] for k in rows])
        profiles.append(DensityProfile(t=t, n=n, m=args.m))
    spread = analysis.collapse_check(profiles, args.g, tuple(args.nu_range))
    print(json.dumps({"spread": spread, "times": sorted(groups)}))
    return 0 if args.tol is None or spread <= args.tol else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lattice-fill", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a recipe and export its data")
    r.add_argument("--recipe", required=True, choices=sorted(RECIPES))
    r.add_argument("--no-check", action="store_true", help="skip the recipe checks")
    _add_run_flags(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", help="run recipes and report their checks")
    c.add_argument("--recipe", action="append", choices=sorted(RECIPES), help="repeatable; default all")
    _add_run_flags(c)
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("fit", help="fit a model to an exported N(t) CSV")
    f.add_argument("--input", required=True)
    f.add_argument("--model", required=True, choices=analysis.MODELS)
    f.add_argument("--window", type=float, nargs=2, metavar=("T_LO", "T_HI"))
    f.add_argument("--method", default="exact")
    f.add_argument("--label", default="")
    f.add_argument("--nss", type=float, help="steady-state N for exp_relax")
    f.set_defaults(func=cmd_fit)

    k = sub.add_parser("collapse", help="scaling-collapse spread of exported profiles")
    k.add_argument("--input", required=True)
    k.add_argument("--g", type=float, required=True)
    k.add_argument("--m", type=int, required=True, help="injection site (1-based)")
    k.add_argument("--method", default="lindblad")
    k.add_argument("--label", default="")
    k.add_argument("--nu-range", type=float, nargs=2, default=(0.1, 0.9))
    k.add_argument("--tol", type=float, help="exit non-zero if the spread exceeds this")
    k.set_defaults(func=cmd_collapse)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
