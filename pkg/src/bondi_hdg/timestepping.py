"""Classical RK4 in method-of-lines form.

Only the coefficients of ``u_h`` are advanced; every stage reconstructs the
metric variables afresh through the RHS kernel.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .diagnostics import (
    DiagnosticsRecord,
    bondi_mass_from_g_tilde,
    dissipation_terms,
    energy_budget_bound,
    energy_interval_residual,
)
from .errors import ConfigurationError, NumericalBlowup
from .field import PolyField
from .mesh import Mesh
from .operator import boundary_value
from .reconstruction import reconstruct
from .tables import Discretization

# max characteristic speed: g~/2 <= 1/2
MAX_SPEED = 0.5


def cfl_dt(mesh: Mesh, k: int, cfl: float) -> float:
    """``cfl * h_min / (speed * (2k + 1))``."""
    if not 0.0 < cfl <= 1.0:
        raise ConfigurationError(f"cfl must lie in (0, 1], got {cfl}")
    return cfl * mesh.h_min / (MAX_SPEED * (2 * k + 1))


def cfl_number(mesh: Mesh, k: int, dt: float) -> float:
    """The cfl value that :func:`cfl_dt` would need to produce ``dt``."""
    return dt * MAX_SPEED * (2 * k + 1) / mesh.h_min


@dataclass
class TimeConfig:
    T_final: float
    dt: float | None = None
    cfl: float = 0.5
    snapshot_times: tuple = ()

    def __post_init__(self):
        if not self.T_final >= 0.0:
            raise ConfigurationError(f"T_final must be nonnegative, got {self.T_final}")
        if self.dt is not None and not self.dt > 0.0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigurationError(f"cfl must lie in (0, 1], got {self.cfl}")
        snaps = sorted(set(float(s) for s in self.snapshot_times) | {0.0, float(self.T_final)})
        if snaps[0] < 0.0 or snaps[-1] > self.T_final:
            raise ConfigurationError("snapshot times must lie in [0, T_final]")
        self.snapshot_times = tuple(snaps)

    def step_size(self, mesh: Mesh, k: int) -> float:
        if self.dt is None:
            return cfl_dt(mesh, k, self.cfl)
        nu = cfl_number(mesh, k, self.dt)
        if nu > 1.0:
            warnings.warn(
                f"explicit dt={self.dt} corresponds to cfl={nu:.3g} > 1; "
                "the run may be unstable", RuntimeWarning, stacklevel=3)
        return self.dt


@dataclass
class RunRecord:
    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (t, PolyField)
    final: PolyField | None = None
    dt: float = 0.0
    steps: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def energy_budget_residual(self) -> float:
        return max((r.energy_budget_residual for r in self.records), default=0.0)

    @property
    def deep_collapse(self) -> bool:
        return any(r.deep_collapse for r in self.records)


def _next_step(t: float, target: float, dt: float):
    """Step size and new time, landing exactly on ``target``.

    A remainder between one and two steps is split into two equal halves, so
    no step is shorter than ``dt / 2`` unless the snapshot spacing itself is.
    """
    remaining = target - t
    if remaining <= dt * (1.0 + 1e-9):
        return remaining, target
    if remaining < 2.0 * dt:
        h = 0.5 * remaining
        return h, t + h
    return dt, t + dt


def _rk4(C, t, dt, f, k1=None):
    if k1 is None:
        k1 = f(C, t)
    k2 = f(C + (0.5 * dt) * k1, t + 0.5 * dt)
    k3 = f(C + (0.5 * dt) * k2, t + 0.5 * dt)
    k4 = f(C + dt * k3, t + dt)
    return C + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(u: PolyField, t: float, dt: float, U_b, disc: Discretization | None = None,
             rhs=None) -> PolyField:
    """One classical RK4 step; ``U_b`` is evaluated at the stage times.

    ``rhs(C, t) -> dC`` may replace the HDG operator (used for testing).
    """
    if not dt > 0.0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    if rhs is None:
        disc = disc if disc is not None else Discretization(u.mesh, u.k)

        def rhs(C, tt):
            return kernels.rhs(C, disc, boundary_value(U_b, tt), tt)[0]

    C = _rk4(u.coeffs, t, dt, rhs)
    if not np.all(np.isfinite(C)):
        raise NumericalBlowup(f"non-finite coefficients after step at t={t}", time=t)
    return PolyField(u.mesh, C)


def integrate(u0: PolyField, cfg: TimeConfig, U_b, observers=(), disc: Discretization | None = None,
              step_hook=None) -> RunRecord:
    """Advance ``u0`` to ``cfg.T_final``, landing exactly on every snapshot time.

    Every observer is called at the snapshot times as
    ``observer(t, u, traces, state, record)``.  ``step_hook(step, t, u, record)``
    runs at every accepted time level (used by the invariant audit).
    """
    disc = disc if disc is not None else Discretization(u0.mesh, u0.k)
    dt_nominal = cfg.step_size(u0.mesh, u0.k)
    b = u0.mesh.b
    run = RunRecord(dt=dt_nominal)
    C = u0.coeffs.copy()
    t = 0.0
    step = 0
    prev = None
    snaps = list(cfg.snapshot_times)
    next_snap = 0

    def f(Cs, ts):
        return kernels.rhs(Cs, disc, boundary_value(U_b, ts), ts)[0]

    while True:
        ub = boundary_value(U_b, t)
        try:
            k1, aux = kernels.rhs(C, disc, ub, t)
        except NumericalBlowup as exc:
            exc.time = t
            raise
        e = float(np.dot(C.ravel(), C.ravel()))
        d = dissipation_terms(aux.g_tilde_nodes, aux.u_left, aux.u_right, ub)
        g0 = aux.g0
        resid = 0.0
        if prev is not None:
            pt, pe, pd, pbound = prev
            resid = energy_interval_residual(pe, e, t - pt, pd, d, pbound, energy_budget_bound(ub, g0))
        rec = DiagnosticsRecord(t=t, l2_u=math.sqrt(e), g0=g0, dissipation=d,
                                bondi_mass=bondi_mass_from_g_tilde(b, aux.g_tilde_nodes[-1]),
                                energy_budget_residual=resid, deep_collapse=aux.deep_collapse,
                                U_b=ub)
        run.records.append(rec)
        prev = (t, e, d, energy_budget_bound(ub, g0))
        u = PolyField(u0.mesh, C)
        if step_hook is not None:
            step_hook(step, t, u, rec)
        if next_snap < len(snaps) and t == snaps[next_snap]:
            run.snapshots.append((t, u.copy()))
            if observers:
                traces, state = reconstruct(u, ub, disc)
                for obs in observers:
                    obs(t, u, traces, state, rec)
            next_snap += 1
        if t >= cfg.T_final:
            break
        target = snaps[next_snap]
        h, t_new = _next_step(t, target, dt_nominal)
        C_new = _rk4(C, t, h, f, k1=k1)
        if not np.all(np.isfinite(C_new)):
            raise NumericalBlowup(f"non-finite coefficients in step from t={t}", time=t)
        C = C_new
        t = t_new
        step += 1
    run.final = PolyField(u0.mesh, C)
    run.steps = step
    return run
