"""Randomized checks of the structural invariants of the discretization."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bondi_hdg import kernels
from bondi_hdg.audit import audit_state
from bondi_hdg.diagnostics import dissipation, energy_budget_bound
from bondi_hdg.field import PolyField, project
from bondi_hdg.mesh import Mesh, build_uniform
from bondi_hdg.operator import assemble_rhs, numerical_flux, rhs_numpy
from bondi_hdg.reconstruction import reconstruct
from bondi_hdg.tables import Discretization
from bondi_hdg.timestepping import TimeConfig, integrate


@st.composite
def fields(draw, max_N=12, max_k=4, scale=(0.01, 20.0)):
    N = draw(st.integers(1, max_N))
    k = draw(st.integers(0, max_k))
    seed = draw(st.integers(0, 2**32 - 1))
    amp = draw(st.floats(*scale))
    rng = np.random.default_rng(seed)
    nodes = np.concatenate([[0.0], np.cumsum(rng.uniform(0.05, 2.0, N))])
    decay = 0.5 ** np.arange(k + 1)
    C = amp * rng.normal(size=(N, k + 1)) * decay
    return PolyField(Mesh(nodes), C), float(amp * rng.normal())


@given(fields())
def test_metric_bounds_hold_for_any_field(data):
    u, ub = data
    traces, state = reconstruct(u, ub)
    audit_state(state, traces)
    assert np.all(state.g > 0) and np.all(state.g <= 1)
    assert np.all(state.g_tilde <= state.g + 1e-13)


@given(fields(max_k=3, scale=(0.01, 3.0)))
def test_reconstruction_single_valued_at_nodes(data):
    u, ub = data
    _, state = reconstruct(u, ub)
    nodes = u.mesh.nodes[1:-1]
    if nodes.size == 0:
        return
    left = state.sample(nodes, side="left")
    right = state.sample(nodes, side="right")
    for name in ("w", "z", "g", "g_tilde"):
        scale = max(1.0, np.abs(left[name]).max())
        assert np.allclose(left[name], right[name], rtol=0, atol=1e-12 * scale), name


@given(fields())
def test_flux_transmission(data):
    u, ub = data
    traces, state = reconstruct(u, ub)
    for i in range(u.mesh.N - 1):
        assert numerical_flux(state, traces, i, "right") == numerical_flux(state, traces, i + 1, "left")


@given(fields())
def test_dissipation_nonnegative(data):
    u, ub = data
    traces, state = reconstruct(u, ub)
    assert dissipation(u, state, traces, ub) >= 0


@given(N=st.integers(1, 20), k=st.integers(0, 5), c=st.floats(-5, 5), b=st.floats(0.5, 30))
def test_constant_state_is_steady(N, k, c, b):
    u = project(lambda r: np.full_like(r, c), build_uniform(b, N), k)
    for backend in kernels.available_backends():
        with kernels.use_backend(backend):
            assert np.max(np.abs(assemble_rhs(u, 0.0, c))) <= 1e-12 * max(1.0, abs(c))


@pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="compiled core not built")
@given(fields(max_N=30, max_k=6))
def test_backends_equivalent(data):
    u, ub = data
    disc = Discretization(u.mesh, u.k)
    a, aux_a = rhs_numpy(u.coeffs, disc, ub)
    b, aux_b = kernels.rhs_compiled(u.coeffs, disc, ub)
    scale = max(1.0, np.abs(a).max())
    assert np.allclose(a, b, rtol=0, atol=1e-11 * scale)
    assert np.allclose(aux_a.log_g_nodes, aux_b.log_g_nodes, rtol=1e-12, atol=1e-12)
    assert aux_a.deep_collapse == aux_b.deep_collapse


@settings(max_examples=15)
@given(fields(max_N=10, max_k=3, scale=(0.01, 2.0)))
def test_energy_inequality_on_short_runs(data):
    # the inequality is semidiscrete; checked per step it can only fail by the
    # trapezoidal error of the time discretization, which is O(cfl^2) relative
    # to the size of the terms in the budget
    u, ub = data
    for cfl in (0.2, 0.05):
        run = integrate(u, TimeConfig(0.5, cfl=cfl), ub)
        scale = max(r.dissipation + energy_budget_bound(r.U_b, r.g0) for r in run.records)
        assert run.energy_budget_residual <= cfl**2 * scale + 1e-14
