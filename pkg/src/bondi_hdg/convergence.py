"""Convergence harness: fine-mesh reference plus error tables per degree."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import bondi_mass, l2_error, l2_error_reconstructed
from .errors import ConfigurationError
from .field import PolyField, project
from .mesh import build_uniform
from .reconstruction import reconstruct
from .scenarios import Scenario, get_scenario
from .tables import Discretization
from .timestepping import TimeConfig, cfl_dt, integrate


@dataclass
class ConvergenceRow:
    N: int
    h: float
    E_u: float
    E_g: float
    E_M: float
    rate_u: float | None = None
    rate_g: float | None = None
    rate_M: float | None = None

    def as_row(self):
        return (self.N, self.h, self.E_u, self.rate_u, self.E_g, self.rate_g)


@dataclass
class ConvergenceTable:
    k: int
    rows: list = field(default_factory=list)

    def fill_rates(self):
        for prev, cur in zip(self.rows, self.rows[1:]):
            scale = math.log(prev.h / cur.h)
            for name in ("u", "g", "M"):
                e0, e1 = getattr(prev, "E_" + name), getattr(cur, "E_" + name)
                rate = math.log(e0 / e1) / scale if e0 > 0 and e1 > 0 else float("nan")
                setattr(cur, "rate_" + name, rate)
        return self

    def rates(self, name="u"):
        return np.array([getattr(r, "rate_" + name) for r in self.rows[1:]], dtype=float)


@dataclass
class ConvergenceStudy:
    scenario: str
    T: float
    dt: float
    dt_requested: float | None
    N_ref: int
    k_ref: int
    tables: dict

    def metadata(self) -> dict:
        return {
            "scenario": self.scenario, "T": self.T, "dt": self.dt,
            "dt_requested": self.dt_requested, "N_ref": self.N_ref, "k_ref": self.k_ref,
            "bondi_mass_errors": {
                str(k): [{"N": r.N, "E_M": r.E_M, "rate_M": r.rate_M} for r in tab.rows]
                for k, tab in self.tables.items()
            },
        }


def check_nesting(meshes, N_ref):
    for N in meshes:
        if N < 1:
            raise ConfigurationError(f"mesh size must be positive, got {N}")
        if N_ref <= N or N_ref % N:
            raise ConfigurationError(
                f"reference mesh N_ref={N_ref} must be strictly finer than and divisible by N={N}")


def shared_step(scenario: Scenario, degrees, meshes, N_ref, k_ref, dt=None, cfl=0.5) -> float:
    """Common time step for every run: ``dt`` capped by the most restrictive CFL limit.

    One step size for all runs keeps the time error identical across the study, so the
    tabulated differences isolate the spatial error.
    """
    limit = min(cfl_dt(build_uniform(scenario.b, N), k, cfl)
                for N, k in [(N_ref, k_ref)] + [(N, k) for N in meshes for k in degrees])
    return limit if dt is None else min(float(dt), limit)


def _solve(args):
    name, params, N, k, T, dt, q_vol, q_rec = args
    sc = get_scenario(name, **params)
    mesh = build_uniform(sc.b, N)
    disc = Discretization(mesh, k, q_vol, q_rec)
    u0 = project(sc.u0, mesh, k)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        run = integrate(u0, TimeConfig(T, dt=dt), sc.U_b, disc=disc)
    return N, k, run.final.coeffs


def run_convergence(scenario="example1", degrees=(1, 2, 3), meshes=(40, 80, 160, 320), T=0.5,
                    dt=None, N_ref=None, k_ref=None, cfl=0.5, q_vol=None, q_rec=None, jobs=1,
                    scenario_params=None) -> ConvergenceStudy:
    params = dict(scenario_params or {})
    sc = get_scenario(scenario, **params)
    degrees = sorted({int(k) for k in degrees})
    meshes = sorted({int(N) for N in meshes})
    if not degrees or not meshes:
        raise ConfigurationError("need at least one degree and one mesh")
    if min(degrees) < 0:
        raise ConfigurationError("polynomial degree must be nonnegative")
    N_ref = int(N_ref) if N_ref is not None else 4 * meshes[-1]
    k_ref = int(k_ref) if k_ref is not None else degrees[-1] + 2
    check_nesting(meshes, N_ref)
    step = shared_step(sc, degrees, meshes, N_ref, k_ref, dt, cfl)

    def job(N, k, qv=q_vol, qr=q_rec):
        return (scenario, params, N, k, T, step, qv, qr)

    jobs_list = [job(N_ref, k_ref, None, None)] + [job(N, k) for k in degrees for N in meshes]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve, jobs_list))
    else:
        results = [_solve(a) for a in jobs_list]

    ub = sc.U_b(T)
    _, _, C_ref = results[0]
    ref = PolyField(build_uniform(sc.b, N_ref), C_ref)
    ref_disc = Discretization(ref.mesh, k_ref)
    _, ref_state = reconstruct(ref, ub, ref_disc)
    M_ref = bondi_mass(ref_state)

    tables = {k: ConvergenceTable(k) for k in degrees}
    for N, k, C in results[1:]:
        mesh = build_uniform(sc.b, N)
        u = PolyField(mesh, C)
        _, state = reconstruct(u, ub, Discretization(mesh, k, q_vol, q_rec))
        tables[k].rows.append(ConvergenceRow(
            N=N, h=sc.b / N,
            E_u=l2_error(u, ref),
            E_g=l2_error_reconstructed(state, ref_state, "g"),
            E_M=abs(bondi_mass(state) - M_ref)))
    for tab in tables.values():
        tab.rows.sort(key=lambda r: r.N)
        tab.fill_rates()
    return ConvergenceStudy(scenario, T, step, dt, N_ref, k_ref, tables)
