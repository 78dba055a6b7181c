"""Compare the compiled kernels with the pure-Python fallback.

Times each kernel on representative inputs and checks that both backends
return the same numbers. Run with ``python benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from lattice_fill import _fallback

try:
    from lattice_fill import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(L: int):
    rng = np.random.default_rng(7)
    x = np.linspace(0.0, 60.0, 2001)
    c = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
    c = np.ascontiguousarray(c + c.conj().T)
    out = np.empty_like(c)
    return {
        "bessel_jn (scalar x2001)": lambda mod: [mod.bessel_jn(12, float(v)) for v in x],
        "bessel_jn_array (n=12, 2001 pts)": lambda mod: mod.bessel_jn_array(12, x),
        f"lindblad_rhs (L={L})": lambda mod: (mod.lindblad_rhs(c, 0.05, L // 2, -1e-4, 3e-5, out), out.copy())[1],
    }


def _time(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--L", type=int, default=41, help="lattice size for the Lindblad right-hand side")
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    if _kernels is None:
        print("compiled extension not available; only the fallback is timed")
    print(f"{'kernel':36s} {'python':>12s} {'compiled':>12s} {'speed-up':>9s} {'max |diff|':>11s}")
    for name, fn in _cases(args.L).items():
        t_py = _time(lambda: fn(_fallback), args.repeat)
        if _kernels is None:
            print(f"{name:36s} {t_py * 1e3:10.3f}ms")
            continue
        t_c = _time(lambda: fn(_kernels), args.repeat)
        diff = float(np.max(np.abs(np.asarray(fn(_fallback)) - np.asarray(fn(_kernels)))))
        print(f"{name:36s} {t_py * 1e3:10.3f}ms {t_c * 1e3:10.3f}ms {t_py / t_c:8.1f}x {diff:11.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
