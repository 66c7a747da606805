"""Scalar functionals of the discrete solution."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .field import PolyField, TraceSet, field_eval
from .quadrature import gauss_rule
from .reconstruction import ReconstructedState


@dataclass
class DiagnosticsRecord:
    t: float
    l2_u: float
    g0: float
    dissipation: float
    bondi_mass: float
    energy_budget_residual: float
    deep_collapse: bool = False
    U_b: float = 0.0

    CSV_FIELDS = ("t", "l2_u", "g0", "dissipation", "bondi_mass", "energy_budget_residual")

    def as_row(self):
        d = asdict(self)
        return [d[name] for name in self.CSV_FIELDS]


def dissipation_terms(g_tilde_nodes, u_left, u_right, U_b: float) -> float:
    """Centre, outer-boundary and interior-jump contributions, summed."""
    g0 = g_tilde_nodes[0]
    centre = 0.25 * g0 * u_left[0] ** 2
    outer = 0.25 * g_tilde_nodes[-1] * (u_right[-1] - U_b) ** 2
    jumps = u_right[:-1] - u_left[1:]
    interior = 0.25 * float(np.dot(g_tilde_nodes[1:-1], jumps * jumps))
    return float(centre + outer + interior)


def dissipation(u: PolyField, state: ReconstructedState, traces: TraceSet, U_b: float) -> float:
    """Nonnegative dissipation functional of the upwind fluxes."""
    g_tilde_nodes = state.g_tilde_nodes
    _, right = u.endpoint_values()
    g0 = g_tilde_nodes[0]
    u0 = state.u_left[0]
    total = 0.25 * g0 * u0 * u0 + 0.25 * g_tilde_nodes[-1] * (right[-1] - U_b) ** 2
    jumps = right[:-1] - traces.u_hat[:-1]
    return float(total + 0.25 * np.dot(g_tilde_nodes[1:-1], jumps * jumps))


def bondi_mass_from_g_tilde(b: float, g_tilde_b: float) -> float:
    # g(b) = 1, so the mass aspect at r = b reduces to (b/2)(1 - g~(b))
    return 0.5 * b * (1.0 - g_tilde_b)


def bondi_mass(state: ReconstructedState) -> float:
    return bondi_mass_from_g_tilde(state.disc.mesh.b, state.g_tilde_nodes[-1])


def mass_aspect(state: ReconstructedState, r) -> float:
    """``(r/2)(1 - g~/g)``; zero at the centre."""
    vals = state.sample(np.atleast_1d(r), side="left")["mass_aspect"]
    return float(vals[0]) if np.ndim(r) == 0 else vals


def energy_budget_bound(U_b: float, g0: float) -> float:
    return 0.25 * U_b * U_b + 0.25 * (1.0 - g0)


def energy_interval_residual(e0, e1, dt, d0, d1, bound0, bound1) -> float:
    """Violation of the stability inequality over one step (trapezoidal in time).

    ``e`` is ``||u||^2``; positive return values mean the inequality failed.
    """
    rate = 0.5 * (e1 - e0) / dt
    return max(0.0, rate + 0.5 * (d0 + d1) - 0.5 * (bound0 + bound1))


def energy_budget_residual(history) -> float:
    """Worst per-interval violation of the stability inequality over ``history``.

    ``history`` is a sequence of :class:`DiagnosticsRecord`; the result is
    clipped below at zero.
    """
    worst = 0.0
    for r0, r1 in zip(history[:-1], history[1:]):
        worst = max(worst, energy_interval_residual(
            r0.l2_u ** 2, r1.l2_u ** 2, r1.t - r0.t, r0.dissipation, r1.dissipation,
            energy_budget_bound(r0.U_b, r0.g0), energy_budget_bound(r1.U_b, r1.g0)))
    return worst


def _fine_points(mesh, q):
    rule = gauss_rule(q)
    h = mesh.widths
    x = mesh.nodes[:-1, None] + 0.5 * h[:, None] * (rule.nodes[None, :] + 1.0)
    wts = 0.5 * h[:, None] * rule.weights[None, :]
    return x, wts


def l2_error(u: PolyField, reference: PolyField, q: int | None = None) -> float:
    """``||u - u_ref||`` by quadrature on the reference (finer) mesh."""
    q = q if q is not None else max(u.k, reference.k) + 2
    x, wts = _fine_points(reference.mesh, q)
    coarse = field_eval(u, x.ravel()).reshape(x.shape)
    fine = field_eval(reference, x.ravel(), side="left").reshape(x.shape)
    # Gauss points are interior, so side selection never matters here
    return float(np.sqrt(np.sum(wts * (coarse - fine) ** 2)))


def l2_error_reconstructed(state: ReconstructedState, reference: ReconstructedState,
                           quantity: str = "g", q: int | None = None) -> float:
    """L2 difference of a reconstructed quantity against a finer reference."""
    q = q if q is not None else reference.disc.q_rec
    x, wts = _fine_points(reference.disc.mesh, q)
    coarse = state.sample(x.ravel())[quantity].reshape(x.shape)
    fine = reference.at_reference(gauss_rule(q).nodes)[quantity]
    return float(np.sqrt(np.sum(wts * (coarse - fine) ** 2)))
