import math

import numpy as np
import pytest

from bondi_hdg.errors import ConfigurationError, NumericalBlowup
from bondi_hdg.field import PolyField, project
from bondi_hdg.mesh import Mesh, build_uniform
from bondi_hdg.scenarios import constant, example1
from bondi_hdg.timestepping import TimeConfig, cfl_dt, cfl_number, integrate, rk4_step
from oracles import rk4_amplification


def test_cfl_dt_examples():
    mesh = Mesh(np.array([0.0, 0.1, 0.3, 0.6]))
    assert cfl_dt(mesh, 1, 0.3) == pytest.approx(0.02, abs=1e-16)
    assert cfl_dt(mesh, 0, 0.5) == pytest.approx(0.1, abs=1e-16)
    assert cfl_number(build_uniform(10.0, 1000), 2, 0.01) == pytest.approx(2.5)
    with pytest.raises(ConfigurationError):
        cfl_dt(mesh, 1, 0.0)


def test_large_explicit_dt_warns():
    mesh = build_uniform(10.0, 1000)
    cfg = TimeConfig(1.0, dt=0.01)
    with pytest.warns(RuntimeWarning, match="cfl"):
        assert cfg.step_size(mesh, 2) == 0.01


@pytest.mark.parametrize("kwargs", [dict(T_final=-1.0), dict(T_final=1.0, dt=0.0),
                                    dict(T_final=1.0, cfl=1.5),
                                    dict(T_final=1.0, snapshot_times=(2.0,))])
def test_time_config_rejects(kwargs):
    with pytest.raises(ConfigurationError):
        TimeConfig(**kwargs)


def test_rk4_trivial_states():
    mesh = build_uniform(10.0, 8)
    c = 0.7
    u = project(lambda r: np.full_like(r, c), mesh, 2)
    out = rk4_step(u, 0.0, 0.05, lambda t: c)
    assert np.max(np.abs(out.coeffs - u.coeffs)) < 1e-14
    z = rk4_step(PolyField.zeros(mesh, 2), 0.0, 0.05, 0.0)
    assert np.all(z.coeffs == 0)


def test_rk4_amplification_with_mock_rhs():
    u = project(lambda r: 1 + r, build_uniform(1.0, 3), 1)
    out = rk4_step(u, 0.0, 0.1, None, rhs=lambda C, t: -C)
    factor = 1 - 0.1 + 0.005 - 1.0 / 6000 + 1.0 / 240000
    assert abs(factor - 0.9048375) < 1e-12
    assert np.allclose(out.coeffs, rk4_amplification(-0.1) * u.coeffs, rtol=1e-12, atol=0)
    assert abs(rk4_amplification(-0.1) - factor) < 1e-15


def test_rk4_stage_times():
    seen = []

    def rhs(C, t):
        seen.append(t)
        return np.zeros_like(C)

    rk4_step(PolyField.zeros(build_uniform(1.0, 1), 0), 1.0, 0.2, None, rhs=rhs)
    assert seen == [1.0, 1.1, 1.1, 1.2]


def test_rk4_blowup():
    u = project(lambda r: 1 + r, build_uniform(1.0, 3), 1)
    with pytest.raises(NumericalBlowup):
        rk4_step(u, 0.0, 0.1, None, rhs=lambda C, t: C * np.inf)


def test_integrate_zero_time():
    u = project(example1().u0, build_uniform(10.0, 10), 1)
    run = integrate(u, TimeConfig(0.0), example1().U_b)
    assert run.steps == 0 and len(run.snapshots) == 1 and len(run.records) == 1
    assert np.array_equal(run.final.coeffs, u.coeffs)


def test_integrate_constant_state():
    sc = constant(1.0)
    u = project(sc.u0, build_uniform(sc.b, 20), 2)
    dt = cfl_dt(u.mesh, 2, 0.5)
    run = integrate(u, TimeConfig(100 * dt, dt=dt), sc.U_b)
    assert run.steps == 100
    assert np.sqrt(np.sum((run.final.coeffs - u.coeffs) ** 2)) < 1e-12


def test_integrate_lands_on_snapshots():
    sc = example1()
    u = project(sc.u0, build_uniform(10.0, 20), 1)
    seen = []
    run = integrate(u, TimeConfig(0.37, dt=0.05, snapshot_times=(0.1, 0.2, 0.33)), sc.U_b,
                    observers=[lambda t, *rest: seen.append(t)])
    assert seen == [0.0, 0.1, 0.2, 0.33, 0.37]
    assert [t for t, _ in run.snapshots] == seen
    steps = np.diff(run.times)
    assert np.all(steps <= 0.05 * (1 + 1e-9))
    # no sliver steps: every step is at least dt / 2 (all snapshot gaps here exceed that)
    assert steps.min() >= 0.025 - 1e-12


def test_integrate_records_and_hook():
    sc = example1()
    u = project(sc.u0, build_uniform(10.0, 20), 2)
    calls = []
    run = integrate(u, TimeConfig(0.2, dt=0.05), sc.U_b,
                    step_hook=lambda step, t, uu, rec: calls.append((step, t)))
    assert [c[0] for c in calls] == list(range(run.steps + 1))
    rec = run.records[0]
    assert rec.t == 0.0 and rec.l2_u == pytest.approx(np.linalg.norm(u.coeffs))
    assert 0 < rec.g0 <= 1 and rec.dissipation >= 0 and math.isfinite(rec.bondi_mass)


def test_integrate_blowup_reports_time():
    sc = example1()
    u = project(sc.u0, build_uniform(10.0, 10), 1)

    def U_b(t):
        return float("nan") if t > 0.25 else sc.U_b(t)

    with pytest.raises(NumericalBlowup) as info:
        integrate(u, TimeConfig(1.0, dt=0.1), U_b)
    assert info.value.time is not None and info.value.time > 0.25
    nan_start = project(lambda r: np.where(r > 5, np.nan, 1.0), build_uniform(10.0, 10), 1)
    with pytest.raises(NumericalBlowup) as info:
        integrate(nan_start, TimeConfig(1.0), 1.0)
    assert info.value.time == 0.0


@pytest.mark.slow
def test_temporal_self_convergence():
    sc = example1()
    u = project(sc.u0, build_uniform(10.0, 80), 2)
    finals = [integrate(u, TimeConfig(0.5, dt=dt), sc.U_b).final.coeffs
              for dt in (0.02, 0.01, 0.005)]
    d1 = np.linalg.norm(finals[0] - finals[1])
    d2 = np.linalg.norm(finals[1] - finals[2])
    assert 16 * 0.75 <= d1 / d2 <= 16 * 1.25
