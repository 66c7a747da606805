import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bondi_hdg.field import PolyField, field_eval, l2_norm, l2_norm_quadrature, project
from bondi_hdg.mesh import Mesh, build_uniform


def test_shapes_and_views():
    u = PolyField.zeros(build_uniform(4.0, 5), 3)
    assert u.coeffs.shape == (5, 4) and u.k == 3
    u.flat[:] = 1.0
    assert np.all(u.coeffs == 1.0)
    v = PolyField.from_flat(u.mesh, np.arange(20.0))
    assert v.coeffs[1, 0] == 4.0
    w = v.copy()
    w.coeffs[0, 0] = -1
    assert v.coeffs[0, 0] == 0.0


def test_eval_examples():
    m = build_uniform(10.0, 7)
    assert field_eval(PolyField.zeros(m, 2), 3.3) == 0.0
    c = project(lambda r: np.full_like(r, 2.5), m, 2)
    assert abs(field_eval(c, 10.0, side="left") - 2.5) < 1e-14
    with pytest.raises(ValueError):
        field_eval(c, 10.5)
    with pytest.raises(ValueError):
        field_eval(c, -0.1)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_eval_projection_of_sin(k):
    errs = []
    for N in (8, 16, 32):
        u = project(np.sin, build_uniform(3.0, N), k)
        errs.append(abs(field_eval(u, math.pi / 2) - 1.0))
    assert errs[-1] < 2.0 * (3.0 / 32) ** (k + 1)


def test_l2_norm_examples():
    m = build_uniform(10.0, 6)
    assert l2_norm(PolyField.zeros(m, 1)) == 0.0
    one = project(lambda r: np.ones_like(r), m, 1)
    assert abs(l2_norm(one) - math.sqrt(10)) < 1e-13
    lin = project(lambda r: r, build_uniform(1.0, 9), 2)
    assert abs(l2_norm(lin) - 1 / math.sqrt(3)) < 1e-12


@given(arrays(np.float64, (6, 4), elements=st.floats(-100, 100)))
def test_parseval(coeffs):
    mesh = Mesh(np.array([0.0, 0.1, 0.5, 1.0, 2.5, 2.6, 4.0]))
    u = PolyField(mesh, coeffs)
    n = l2_norm(u)
    assert math.isclose(l2_norm_quadrature(u), n, rel_tol=1e-12, abs_tol=1e-12)


def test_endpoint_values():
    m = build_uniform(2.0, 4)
    u = project(lambda r: r**2, m, 2)
    left, right = u.endpoint_values()
    assert np.allclose(left, m.nodes[:-1] ** 2, atol=1e-14)
    assert np.allclose(right, m.nodes[1:] ** 2, atol=1e-13)


def test_projection_is_exact_on_polynomials():
    m = build_uniform(3.0, 5)
    u = project(lambda r: 1 - 2 * r + 0.5 * r**3, m, 3)
    r = np.linspace(0, 3, 41)
    assert np.allclose(field_eval(u, r), 1 - 2 * r + 0.5 * r**3, atol=1e-12)
