"""Kernel dispatch: compiled extension if importable, numpy fallback otherwise.

``BACKEND`` reports which one is active ("compiled" or "python"). Setting the
environment variable ``LATTICE_FILL_PURE=1`` forces the fallback.
"""

import os

from . import _fallback

if os.environ.get("LATTICE_FILL_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback
        BACKEND = "python"
    else:
        BACKEND = "compiled"

bessel_jn = _impl.bessel_jn
bessel_jn_array = _impl.bessel_jn_array
lindblad_rhs = _impl.lindblad_rhs

__all__ = ["BACKEND", "bessel_jn", "bessel_jn_array", "lindblad_rhs"]
