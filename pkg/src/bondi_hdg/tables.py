"""Reference-element tables shared by the reconstruction and the RHS kernels.

Everything here depends only on ``(k, q_vol, q_rec)`` and the reference
points, so it is computed once and cached.  The per-element geometry lives in
:class:`Discretization`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError
from .mesh import Mesh
from .quadrature import (
    basis_antiderivative_table,
    basis_derivative_table,
    basis_table,
    eval_fraction_poly,
    gauss_rule,
    shifted_legendre_monomials,
)


def _readonly(*arrays):
    for a in arrays:
        a.setflags(write=False)


@dataclass(frozen=True)
class PointTables:
    """Tables at reference points ``xi`` for a degree-``k`` field.

    ``psi``     basis values, ``(P, k+1)``
    ``antider`` ``int_{-1}^{xi} psi_m``, ``(P, k+1)``
    ``origin``  ``antider / (1 + xi)`` by exact division (first element only)
    ``lower``   ``int_{-1}^{xi}`` of the Lagrange basis on the ``q_rec`` Gauss nodes
    ``upper``   ``int_{xi}^{1}`` of the same basis
    """

    xi: np.ndarray
    psi: np.ndarray
    antider: np.ndarray
    origin: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


@dataclass(frozen=True)
class Tables:
    k: int
    q_vol: int
    q_rec: int
    rec_weights: np.ndarray
    vol_weights: np.ndarray
    rec: PointTables
    vol: PointTables
    dpsi_vol: np.ndarray
    # first-element factor: u - u_tilde = sqrt(2/h) (1 + xi) * (q_origin @ c)
    q_origin: np.ndarray
    psi_left: np.ndarray
    psi_right: np.ndarray


@lru_cache(maxsize=None)
def _origin_polys(k: int):
    """Exact coefficients (powers of t = 1 + xi) for the first element.

    For ``P_m(t - 1) = sum_j a_j t^j``:
      ``int_0^t P_m / t   = sum_j a_j t^j / (j + 1)``
      ``(P_m - that) / t  = sum_{j>=1} a_j j / (j + 1) t^{j-1}``
    """
    avg, quot = [], []
    for m in range(k + 1):
        a = shifted_legendre_monomials(m)
        avg.append(tuple(aj / (j + 1) for j, aj in enumerate(a)))
        quot.append(tuple(aj * j / (j + 1) for j, aj in enumerate(a))[1:] or (0,))
    return tuple(avg), tuple(quot)


def _eval_exact(polys, xi) -> np.ndarray:
    t = np.asarray(xi, dtype=float) + 1.0
    out = np.empty((len(t), len(polys)))
    for m, coeffs in enumerate(polys):
        for p, tp in enumerate(t):
            out[p, m] = eval_fraction_poly(coeffs, tp)
    return out * np.sqrt((2.0 * np.arange(len(polys)) + 1.0) / 2.0)


def _lagrange_integrals(q_rec: int, xi):
    rule = gauss_rule(q_rec)
    xi = np.asarray(xi, dtype=float)
    # Lagrange basis l_l = sum_n w_l psi_n(x_l) psi_n, exact for degree < q_rec
    coef = basis_table(q_rec - 1, rule.nodes) * rule.weights[:, None]  # (l, n)
    anti = basis_antiderivative_table(q_rec - 1, xi)  # (P, n)
    lower = anti @ coef.T
    tail = -anti.copy()
    tail[:, 0] = (1.0 - xi) * np.sqrt(0.5)
    upper = tail @ coef.T
    return lower, upper


def _build_point_tables(k: int, q_rec: int, xi_key: tuple, with_origin: bool = True) -> PointTables:
    xi = np.array(xi_key, dtype=float)
    lower, upper = _lagrange_integrals(q_rec, xi)
    tabs = PointTables(
        xi=xi,
        psi=basis_table(k, xi),
        antider=basis_antiderivative_table(k, xi),
        origin=_eval_exact(_origin_polys(k)[0], xi) if with_origin else None,
        lower=lower,
        upper=upper,
    )
    return tabs


@lru_cache(maxsize=None)
def _point_tables_cached(k: int, q_rec: int, xi_key: tuple) -> PointTables:
    tabs = _build_point_tables(k, q_rec, xi_key)
    _readonly(tabs.xi, tabs.psi, tabs.antider, tabs.origin, tabs.lower, tabs.upper)
    return tabs


def point_tables(k: int, q_rec: int, xi) -> PointTables:
    xi = np.asarray(xi, dtype=float).ravel()
    if np.any(xi < -1.0) or np.any(xi > 1.0):
        raise ValueError("reference points must lie in [-1, 1]")
    return _point_tables_cached(int(k), int(q_rec), tuple(xi.tolist()))


@lru_cache(maxsize=None)
def build_tables(k: int, q_vol: int, q_rec: int) -> Tables:
    if k < 0:
        raise ConfigurationError(f"degree must be nonnegative, got {k}")
    rec_rule = gauss_rule(q_rec)
    vol_rule = gauss_rule(q_vol)
    rec = point_tables(k, q_rec, rec_rule.nodes)
    vol = point_tables(k, q_rec, vol_rule.nodes)
    q_origin = _eval_exact(_origin_polys(k)[1], rec_rule.nodes)
    ends = basis_table(k, np.array([-1.0, 1.0]))
    tabs = Tables(
        k=k,
        q_vol=q_vol,
        q_rec=q_rec,
        rec_weights=np.array(rec_rule.weights),
        vol_weights=np.array(vol_rule.weights),
        rec=rec,
        vol=vol,
        dpsi_vol=basis_derivative_table(k, vol_rule.nodes),
        q_origin=q_origin,
        psi_left=ends[0].copy(),
        psi_right=ends[1].copy(),
    )
    _readonly(tabs.rec_weights, tabs.vol_weights, tabs.dpsi_vol, tabs.q_origin,
              tabs.psi_left, tabs.psi_right)
    return tabs


def default_q_vol(k: int) -> int:
    return k + 3


def default_q_rec(k: int) -> int:
    return 2 * k + 3


@dataclass(frozen=True, eq=False)
class Discretization:
    """Mesh, degree and quadrature orders, with cached element geometry."""

    mesh: Mesh
    k: int
    q_vol: int | None = None
    q_rec: int | None = None
    tables: Tables = field(init=False, repr=False)

    def __post_init__(self):
        if self.k < 0:
            raise ConfigurationError(f"degree must be nonnegative, got {self.k}")
        qv = self.q_vol if self.q_vol is not None else default_q_vol(self.k)
        qr = self.q_rec if self.q_rec is not None else default_q_rec(self.k)
        object.__setattr__(self, "q_vol", int(qv))
        object.__setattr__(self, "q_rec", int(qr))
        object.__setattr__(self, "tables", build_tables(self.k, self.q_vol, self.q_rec))
        h = self.mesh.widths
        a = self.mesh.nodes[:-1]
        geom = {
            "h": h,
            "a": a,
            "sqrt_2_over_h": np.sqrt(2.0 / h),
            "sqrt_h_over_2": np.sqrt(0.5 * h),
            "r_rec": a[:, None] + 0.5 * h[:, None] * (self.tables.rec.xi[None, :] + 1.0),
            "r_vol": a[:, None] + 0.5 * h[:, None] * (self.tables.vol.xi[None, :] + 1.0),
        }
        for key, val in geom.items():
            val = np.ascontiguousarray(val)
            val.setflags(write=False)
            object.__setattr__(self, "_" + key, val)

    h = property(lambda self: self._h)
    a = property(lambda self: self._a)
    sqrt_2_over_h = property(lambda self: self._sqrt_2_over_h)
    sqrt_h_over_2 = property(lambda self: self._sqrt_h_over_2)
    r_rec = property(lambda self: self._r_rec)
    r_vol = property(lambda self: self._r_vol)

    @property
    def N(self) -> int:
        return self.mesh.N

    @property
    def ndof(self) -> int:
        return self.mesh.N * (self.k + 1)
