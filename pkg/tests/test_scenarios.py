import math

import numpy as np
import pytest

from bondi_hdg.errors import ConfigurationError
from bondi_hdg.field import project
from bondi_hdg.mesh import build_uniform
from bondi_hdg.reconstruction import reconstruct
from bondi_hdg.scenarios import SCENARIOS, constant, example1, example2, example3, get_scenario, vacuum
from bondi_hdg.timestepping import TimeConfig, integrate


def test_example1_values():
    sc = example1()
    assert sc.b == 10.0
    assert sc.u0(np.array(5.0)) == pytest.approx(6.75, abs=1e-14)
    assert sc.u0(np.array(10.0)) == pytest.approx(0.45, abs=1e-11)
    assert sc.U_b(0.0) == sc.U_b(3.0) == pytest.approx(float(sc.u0(np.array(10.0))), abs=0)
    assert sc.u_tilde0(np.array(0.0)) == pytest.approx(-0.45, abs=1e-12)


def test_example2_values():
    sc = example2()
    m = 1 / 5.1
    assert m == pytest.approx(0.19608, abs=1e-5)
    assert sc.u0(np.array(6.0)) == pytest.approx(6 / 5.1, abs=1e-14)
    assert sc.u0(np.array(0.0)) == pytest.approx(math.tanh(-6 / 5.1), abs=1e-14)
    assert math.tanh(-6 / 5.1) == pytest.approx(-0.826335, abs=1e-6)
    assert sc.U_b(0.0) == pytest.approx(float(sc.u0(np.array(10.0))), abs=0)
    assert sc.default_T > 5


def test_example3_values():
    sc = example3()
    assert sc.b == 20.0 and sc.default_T == 60.0
    assert set(sc.default_snapshots) == {0.0, 20.0, 60.0}
    assert sc.u0(np.array(8.0)) == pytest.approx(1.536, abs=1e-14)
    assert sc.u0(np.array(0.0)) == 0.0
    assert sc.u_tilde0(np.array(8.0)) == pytest.approx(0.512, abs=1e-14)
    assert sc.U_b(17.0) == 0.0


@pytest.mark.parametrize("factory", [example1, example2, example3])
def test_u0_is_derivative_of_r_u_tilde(factory):
    sc = factory()
    r = np.linspace(0.5, sc.b - 0.5, 41)
    eps = 1e-5
    fd = ((r + eps) * sc.u_tilde0(r + eps) - (r - eps) * sc.u_tilde0(r - eps)) / (2 * eps)
    assert np.allclose(fd, sc.u0(r), atol=1e-7)


@pytest.mark.parametrize("factory", [example1, example2, example3])
def test_u0_finite(factory):
    sc = factory()
    r = np.linspace(0, sc.b, 1001)
    assert np.all(np.isfinite(sc.u0(r)))


def test_trivial_scenarios():
    sc = vacuum()
    u = project(sc.u0, build_uniform(sc.b, 10), 2)
    run = integrate(u, TimeConfig(0.5), sc.U_b)
    assert np.all(run.final.coeffs == 0)
    sc = constant(1.0)
    u = project(sc.u0, build_uniform(sc.b, 10), 2)
    run = integrate(u, TimeConfig(0.5), sc.U_b)
    assert np.allclose(run.final.coeffs, u.coeffs, atol=1e-13)
    _, st = reconstruct(run.final, 1.0)
    assert np.all(st.g == 1.0)
    sc = constant(0.3)
    u = project(sc.u0, build_uniform(sc.b, 10), 2)
    run = integrate(u, TimeConfig(0.5), sc.U_b)
    assert np.allclose(run.column("bondi_mass"), 0.0, atol=1e-13)


def test_registry():
    assert set(SCENARIOS) == {"example1", "example2", "example3", "vacuum", "constant"}
    assert get_scenario("constant", c=2.0).u0(np.array(3.0)) == 2.0
    with pytest.raises(ConfigurationError):
        get_scenario("example4")
