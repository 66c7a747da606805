"""Semidiscrete right-hand side of the HDG weak form.

For every element and every orthonormal test function ``phi_m``

    (u_t, phi_m) = -(g~ u / 2, phi_m') + [F phi_m]_{r_{i-1}}^{r_i} - (g~_r u~ / 2, phi_m)

with the upwind fluxes ``F(r_i) = g~(r_i) u^(r_i) / 2`` on the right face and
``F(r_{i-1}) = g~(r_{i-1}) u_h(r_{i-1}) / 2`` on the left face.  The mass
matrix is the identity, so the residual is ``dU/dt`` directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalBlowup
from .field import PolyField, TraceSet
from .reconstruction import ReconstructedState, discretization_for, reconstruct
from .tables import Discretization


@dataclass
class RhsAux:
    """Side products of an RHS evaluation used by the diagnostics."""

    g_tilde_nodes: np.ndarray
    log_g_nodes: np.ndarray
    u_left: np.ndarray
    u_right: np.ndarray
    deep_collapse: bool

    @property
    def g0(self) -> float:
        return float(self.g_tilde_nodes[0])


def boundary_value(U_b, t: float) -> float:
    return float(U_b(t)) if callable(U_b) else float(U_b)


def numerical_flux(state: ReconstructedState, traces: TraceSet, i: int, side: str) -> float:
    """Flux on the ``side`` face of element ``i`` (0-based)."""
    if side == "right":
        return 0.5 * state.g_tilde_nodes[i + 1] * traces.u_hat[i]
    if side == "left":
        return 0.5 * state.g_tilde_nodes[i] * state.u_left[i]
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def residual_from_state(state: ReconstructedState, traces: TraceSet) -> np.ndarray:
    disc = state.disc
    tab = disc.tables
    flux_right = 0.5 * state.g_tilde_nodes[1:] * traces.u_hat
    flux_left = 0.5 * state.g_tilde_nodes[:-1] * state.u_left
    wv = tab.vol_weights
    transport = (wv * 0.5 * state.g_tilde * state.u) @ tab.dpsi_vol
    source = (0.5 * disc.h)[:, None] * ((wv * 0.5 * state.g_tilde_r * state.u_tilde) @ tab.vol.psi)
    faces = flux_right[:, None] * tab.psi_right - flux_left[:, None] * tab.psi_left
    return disc.sqrt_2_over_h[:, None] * (faces - transport - source)


def _check_finite(dC, t):
    if not np.all(np.isfinite(dC)):
        bad = int(np.argmax(~np.all(np.isfinite(dC), axis=1)))
        raise NumericalBlowup(f"non-finite residual in element {bad} at t={t}", time=t, element=bad)


def rhs_numpy(C: np.ndarray, disc: Discretization, U_b: float, t: float = 0.0):
    """Reference (numpy) kernel: ``(dC, RhsAux)`` for coefficients ``C``."""
    u = PolyField(disc.mesh, C)
    traces, state = reconstruct(u, U_b, disc)
    dC = residual_from_state(state, traces)
    _check_finite(dC, t)
    aux = RhsAux(state.g_tilde_nodes, state.log_g_nodes, state.u_left, state.u_right,
                 state.deep_collapse)
    return dC, aux


def assemble_rhs(u: PolyField, t: float, U_b, disc: Discretization | None = None) -> np.ndarray:
    """Flat residual ``dU/dt`` (length ``N (k + 1)``) at time ``t``."""
    from . import kernels

    disc = discretization_for(u, disc)
    dC, _ = kernels.rhs(u.coeffs, disc, boundary_value(U_b, t), t)
    return dC.reshape(-1)
