"""Backend selection for the RHS kernel.

The compiled extension ``bondi_hdg._ccore`` is used when it was built; the
numpy implementation in :mod:`bondi_hdg.operator` is the fallback and the
reference both are tested against.
"""
from __future__ import annotations

import numpy as np

from .operator import RhsAux, _check_finite, rhs_numpy

try:
    from . import _ccore
except ImportError:  # extension not built
    _ccore = None

HAVE_COMPILED = _ccore is not None
_backend = "compiled" if HAVE_COMPILED else "numpy"


def available_backends():
    return ["compiled", "numpy"] if HAVE_COMPILED else ["numpy"]


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("compiled", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled backend requested but bondi_hdg._ccore is not built")
    _backend = name


class use_backend:
    """Context manager temporarily switching the backend."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        self.previous = get_backend()
        set_backend(self.name)
        return self

    def __exit__(self, *exc):
        set_backend(self.previous)


def rhs_compiled(C, disc, U_b: float, t: float = 0.0):
    tab = disc.tables
    N, kp1 = C.shape
    dC = np.empty((N, kp1))
    gt_nodes = np.empty(N + 1)
    log_g_nodes = np.empty(N + 1)
    u_left = np.empty(N)
    u_right = np.empty(N)
    deep = _ccore.rhs(
        np.ascontiguousarray(C, dtype=float), disc.mesh.nodes, float(U_b),
        tab.rec.xi, tab.rec.psi, tab.rec.antider, tab.q_origin, tab.rec_weights, tab.rec.upper,
        tab.vol.xi, tab.vol.psi, tab.dpsi_vol, tab.vol.antider, tab.vol.origin, tab.vol_weights,
        tab.vol.upper, tab.vol.lower, tab.psi_left, tab.psi_right,
        dC, gt_nodes, log_g_nodes, u_left, u_right,
    )
    _check_finite(dC, t)
    return dC, RhsAux(gt_nodes, log_g_nodes, u_left, u_right, bool(deep))


def rhs(C, disc, U_b: float, t: float = 0.0):
    """``(dC, RhsAux)`` using the active backend."""
    if _backend == "compiled":
        return rhs_compiled(C, disc, U_b, t)
    return rhs_numpy(C, disc, U_b, t)
