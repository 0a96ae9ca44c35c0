"""Numeric kernel backend selection.

The hot loops (path simulation, hedging, lattice and PDE stepping,
quadrature, special functions) exist twice: a compiled Cython core and a
pure-Python fallback written operation for operation against the same
libm calls, so the two return bit-identical doubles. The compiled core is
picked when the extension imported; set ``NOARB_PURE=1`` to force the
fallback (used by the parity tests and the backend benchmark).
"""

import os

if os.environ.get("NOARB_PURE", "0") not in ("", "0"):
    from . import _pure as backend
else:
    try:
        from . import _core as backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as backend

BACKEND = backend.BACKEND

erfc = backend.erfc
norm_cdf = backend.norm_cdf
norm_ppf = backend.norm_ppf
normal_at = backend.normal_at
mean_stderr = backend.mean_stderr
bs_call_price = backend.bs_call_price
bs_call_delta = backend.bs_call_delta
sim_exact = backend.sim_exact
sim_euler = backend.sim_euler
hedge_errors = backend.hedge_errors
crr_price = backend.crr_price
fd_surface = backend.fd_surface
simpson_lognormal = backend.simpson_lognormal
