"""Pure numpy versions of the kernels in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
``LATTICE_FILL_PURE=1`` is set.
"""

import math

import numpy as np

_BIG = 1.0e250
_SMALL = 1.0e-250
_SERIES_MAX = 1.0e-5


def _start_order(n, x):
    top = max(float(x), float(n))
    start = int(top + 20.0 + math.sqrt(40.0 * top))
    return start + (start % 2)


def bessel_jn(n, x):
    """J_n(x) for integer ``n >= 0`` by normalised Miller recurrence."""
    if n < 0:
        raise ValueError("order must be non-negative")
    return float(bessel_jn_array(n, np.array([x], dtype=float))[0])


def bessel_jn_array(n, x):
    """Vectorised Miller recurrence; every element shares one start order."""
    if n < 0:
        raise ValueError("order must be non-negative")
    x = np.asarray(x, dtype=float)
    shape = x.shape
    xa = np.abs(x.reshape(-1))
    out = np.zeros_like(xa)
    zero = xa == 0.0
    out[zero] = 1.0 if n == 0 else 0.0
    tiny = ~zero & (xa < _SERIES_MAX)
    if tiny.any():
        # two terms of the power series; the recurrence would overflow in 2k/x
        h = 0.5 * xa[tiny]
        term = np.ones_like(h)
        for k in range(1, n + 1):
            term *= h / k
        out[tiny] = term * (1.0 - h * h / (n + 1))
    live = ~zero & ~tiny
    if live.any():
        xs = xa[live]
        start = _start_order(n, xs.max())
        jp = np.zeros_like(xs)
        j = np.full_like(xs, 1.0e-30)
        total = np.zeros_like(xs)
        result = np.zeros_like(xs)
        for k in range(start, 0, -1):
            jm = (2.0 * k / xs) * j - jp
            jp, j = j, jm
            order = k - 1
            if order == n:
                result = j.copy()
            if order % 2 == 0 and order > 0:
                total += 2.0 * j
            big = np.abs(j) > _BIG
            if big.any():
                scale = np.where(big, _SMALL, 1.0)
                j *= scale
                jp *= scale
                total *= scale
                result *= scale
        total += j
        out[live] = result / total
    if n % 2:
        out = np.where(x.reshape(-1) < 0, -out, out)
    return out.reshape(shape)


def lindblad_rhs(c, g, m, site_rate, source, out):
    """Write dC/dt of the local Lindblad correlation equation into ``out``."""
    out[...] = 0.0
    out[1:, :] += c[:-1, :]
    out[:-1, :] += c[1:, :]
    out[:, 1:] -= c[:, :-1]
    out[:, :-1] -= c[:, 1:]
    out *= 1j * g
    out[m, :] += site_rate * c[m, :]
    out[:, m] += site_rate * c[:, m]
    out[m, m] += source
    return out
