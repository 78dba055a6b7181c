# cython: language_level=3
"""Compiled inner loops.

Two kernels dominate the runtime of the analytic and Lindblad routes:

* ``bessel_jn`` -- integer-order Bessel function of the first kind, called
  tens of thousands of times per density evaluation from inside nested
  adaptive quadrature.
* ``lindblad_rhs`` -- the nearest-neighbour stencil of the local Lindblad
  correlation equation, called once per integrator stage.

``lattice_fill._fallback`` holds numpy versions with identical signatures.
"""

from libc.math cimport sqrt, fabs

import numpy as np

cdef double _BIG = 1.0e250
cdef double _SMALL = 1.0e-250
cdef double _SERIES_MAX = 1.0e-5


cdef inline int _start_order(int n, double x) nogil:
    cdef double top = x if x > n else <double>n
    cdef int start = <int>(top + 20.0 + sqrt(40.0 * top))
    if start % 2:
        start += 1
    return start


cdef double _series(int n, double x) nogil:
    # two terms of the power series; relative error ~ x**4 / 64
    cdef double h = 0.5 * x
    cdef double term = 1.0
    cdef int k
    for k in range(1, n + 1):
        term *= h / k
    return term * (1.0 - h * h / (n + 1))


cdef double _jn(int n, double x) nogil:
    cdef int k, start
    cdef double jp, j, jm, total, result, sgn
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    sgn = 1.0
    if x < 0.0:
        x = -x
        if n % 2:
            sgn = -1.0
    if x < _SERIES_MAX:
        return sgn * _series(n, x)
    start = _start_order(n, x)
    jp = 0.0
    j = 1.0e-30
    total = 0.0
    result = 0.0
    k = start
    while k > 0:
        jm = (2.0 * k / x) * j - jp
        jp = j
        j = jm
        k -= 1
        # j now holds the (unnormalised) order-k value
        if k == n:
            result = j
        if k % 2 == 0 and k > 0:
            total += 2.0 * j
        if fabs(j) > _BIG:
            j *= _SMALL
            jp *= _SMALL
            total *= _SMALL
            result *= _SMALL
    total += j
    return sgn * result / total


cpdef double bessel_jn(int n, double x):
    """J_n(x) for integer ``n >= 0`` by normalised Miller recurrence."""
    if n < 0:
        raise ValueError("order must be non-negative")
    return _jn(n, x)


def bessel_jn_array(int n, x):
    """Vectorised :func:`bessel_jn` over a float array ``x``."""
    if n < 0:
        raise ValueError("order must be non-negative")
    arr = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(arr)
    cdef double[::1] xv = arr.reshape(-1)
    cdef double[::1] ov = out.reshape(-1)
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _jn(n, xv[i])
    return out


def lindblad_rhs(double complex[:, ::1] c, double g, int m, double site_rate,
                 double source, double complex[:, ::1] out):
    """Write dC/dt of the local Lindblad correlation equation into ``out``.

    dC_ij/dt = i g (C_{i-1,j} - C_{i,j+1} + C_{i+1,j} - C_{i,j-1})
               + site_rate (delta_im + delta_jm) C_ij + source delta_im delta_jm

    with open boundaries (out-of-range entries are zero).
    """
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex acc
    cdef double complex ig = 1j * g
    with nogil:
        for i in range(n):
            for j in range(n):
                acc = 0
                if i > 0:
                    acc = acc + c[i - 1, j]
                if i < n - 1:
                    acc = acc + c[i + 1, j]
                if j > 0:
                    acc = acc - c[i, j - 1]
                if j < n - 1:
                    acc = acc - c[i, j + 1]
                acc = ig * acc
                if i == m:
                    acc = acc + site_rate * c[i, j]
                if j == m:
                    acc = acc + site_rate * c[i, j]
                out[i, j] = acc
        out[m, m] = out[m, m] + source
    return out
