"""Invariant audit for reconstructed states (used by ``bondi-hdg check``)."""
from __future__ import annotations

import numpy as np

from .errors import InvariantViolation
from .field import TraceSet
from .reconstruction import ReconstructedState

METRIC_BOUNDS = "disc-metric-bounds"
G_MONOTONE = "g-monotone"
Z_MONOTONE = "z-monotone"
TILDEG_IDENTITY = "tildeg-identity"
ENERGY_BUDGET = "energy-budget"
FINITE = "finite"

G_TILDE_SLACK = 1e-13


def _fail(tag, quantity, arr, mask, step, extra=""):
    pos = np.argwhere(mask)[0]
    element = int(pos[0]) if arr.ndim > 1 else int(pos[0])
    value = float(arr[tuple(pos)])
    raise InvariantViolation(
        f"[{tag}] step={step} element={element} quantity={quantity} value={value!r}{extra}",
        tag=tag, step=step, element=element, quantity=quantity)


def audit_state(state: ReconstructedState, traces: TraceSet, step=None,
                g_tilde_r_tol: float = 1e-9) -> None:
    """Raise :class:`InvariantViolation` on the first failed discrete invariant."""
    for name in ("g", "g_tilde", "g_tilde_r", "u_tilde", "z", "w"):
        arr = getattr(state, name)
        bad = ~np.isfinite(arr)
        if bad.any():
            _fail(FINITE, name, arr, bad, step)
    for name, arr in (("g", state.g), ("g_rec", state.g_rec)):
        bad = (arr <= 0.0) | (arr > 1.0)
        if bad.any():
            _fail(METRIC_BOUNDS, name, arr, bad, step)
    bad = state.g_tilde <= 0.0
    if bad.any():
        _fail(METRIC_BOUNDS, "g_tilde", state.g_tilde, bad, step)
    bad = state.g_tilde > state.g + G_TILDE_SLACK
    if bad.any():
        _fail(METRIC_BOUNDS, "g_tilde-g", state.g_tilde - state.g, bad, step)
    g_nodes = np.concatenate([[state.g0], traces.g_hat])
    bad = np.diff(g_nodes) < 0.0
    if bad.any() or traces.g_hat[-1] != 1.0:
        _fail(G_MONOTONE, "g_hat", np.diff(g_nodes), bad if bad.any() else np.ones(1, bool), step)
    bad = np.diff(state.z_nodes) <= 0.0
    if bad.any():
        _fail(Z_MONOTONE, "z_hat", np.diff(state.z_nodes), bad, step)
    bad = state.g_tilde_r < -g_tilde_r_tol
    if bad.any():
        _fail(TILDEG_IDENTITY, "g_tilde_r", state.g_tilde_r, bad, step)


def audit_energy(record, step=None, tol: float = 1e-6) -> None:
    if record.energy_budget_residual > tol:
        raise InvariantViolation(
            f"[{ENERGY_BUDGET}] step={step} t={record.t} residual={record.energy_budget_residual!r}",
            tag=ENERGY_BUDGET, step=step, quantity="energy_budget_residual")
