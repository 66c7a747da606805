"""Trace elimination and reconstruction of the constrained variables.

Given ``u_h`` the skeleton traces follow from three sweeps: ``w`` and ``z``
left to right from the centre, ``g`` right to left from ``g(b) = 1``.  All
partial integrals of the non-polynomial integrands go through one discrete
operator, the exact integral of the ``q_rec``-point Gauss interpolant, so
that element endpoint values coincide with the traces.

``g`` is carried as its logarithm; values are floored at the smallest
positive normal double, which sets the ``deep_collapse`` flag.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import PolyField, TraceSet
from .quadrature import antiderivative_coeffs
from .tables import Discretization, PointTables, _build_point_tables, point_tables

TINY = np.finfo(float).tiny
LOG_TINY = float(np.log(TINY))


def discretization_for(u: PolyField, disc: Discretization | None = None) -> Discretization:
    if disc is None:
        return Discretization(u.mesh, u.k)
    if disc.mesh is not u.mesh and not np.array_equal(disc.mesh.nodes, u.mesh.nodes):
        raise ValueError("field and discretization live on different meshes")
    if disc.k != u.k:
        raise ValueError(f"field degree {u.k} does not match discretization degree {disc.k}")
    return disc


def _exp_floor(log_values):
    """``exp`` with a floor at the smallest normal; returns (values, floored?)."""
    floored = bool(np.any(log_values < LOG_TINY))
    return np.exp(np.maximum(log_values, LOG_TINY)), floored


@dataclass
class WSweep:
    w_nodes: np.ndarray  # w at r_0 .. r_N
    coeffs: np.ndarray  # per-element w_h of degree k + 1, shape (N, k + 2)

    @property
    def w_hat(self):
        return self.w_nodes[:-1]


@dataclass
class TildeU:
    rec: np.ndarray
    vol: np.ndarray
    at_origin: float


@dataclass
class PhiSamples:
    values: np.ndarray  # (N, q_rec)
    integrals: np.ndarray  # (N,)


@dataclass
class GSweep:
    log_g_nodes: np.ndarray  # log g at r_0 .. r_N
    g_hat: np.ndarray  # g at r_1 .. r_N
    deep_collapse: bool


@dataclass
class GValues:
    rec: np.ndarray
    vol: np.ndarray
    g0: float
    deep_collapse: bool
    g_nodes: np.ndarray | None = None  # g at r_0 .. r_N; enables the monotone bracket on z


@dataclass
class ZValues:
    z_nodes: np.ndarray  # z at r_0 .. r_N
    vol: np.ndarray
    g_tilde_vol: np.ndarray
    g_tilde_r_vol: np.ndarray
    g_tilde_nodes: np.ndarray  # g_tilde at r_0 .. r_N, with g_tilde(0) = g(0)

    @property
    def z_hat(self):
        return self.z_nodes[:-1]


def sweep_w(u: PolyField) -> WSweep:
    """Running exact integrals of ``u_h`` and the elementwise ``w_h``."""
    h = u.mesh.widths
    # int_{I_i} u_h = sqrt(h_i) * c_{i,0} in the orthonormal basis
    w_nodes = np.concatenate([[0.0], np.cumsum(np.sqrt(h) * u.coeffs[:, 0])])
    coeffs = antiderivative_coeffs(u.coeffs, h)
    coeffs[:, 0] += w_nodes[:-1] * np.sqrt(h)
    return WSweep(w_nodes, coeffs)


def _tilde_u_at(C, w_nodes, disc: Discretization, pt: PointTables, r):
    w = w_nodes[:-1, None] + disc.sqrt_h_over_2[:, None] * (C @ pt.antider.T)
    with np.errstate(divide="ignore", invalid="ignore"):
        tu = w / r
    # first element: w_h = r * p_h, divided exactly
    tu[0] = disc.sqrt_2_over_h[0] * (pt.origin @ C[0])
    return tu, w


def tilde_u_values(u: PolyField, ws: WSweep, disc: Discretization | None = None) -> TildeU:
    disc = discretization_for(u, disc)
    tab = disc.tables
    rec, _ = _tilde_u_at(u.coeffs, ws.w_nodes, disc, tab.rec, disc.r_rec)
    vol, _ = _tilde_u_at(u.coeffs, ws.w_nodes, disc, tab.vol, disc.r_vol)
    u0 = disc.sqrt_2_over_h[0] * float(u.coeffs[0] @ tab.psi_left)
    return TildeU(rec, vol, u0)


def phi_samples(u: PolyField, tu: TildeU, disc: Discretization | None = None) -> PhiSamples:
    """Samples of ``(u_h - u~_h)^2 / s`` and their elementwise integrals."""
    disc = discretization_for(u, disc)
    tab = disc.tables
    u_rec = disc.sqrt_2_over_h[:, None] * (u.coeffs @ tab.rec.psi.T)
    values = (u_rec - tu.rec) ** 2 / disc.r_rec
    # first element: u - u~ = r q_h with q_h from exact division, so Phi = r q_h^2
    h0 = disc.h[0]
    qv = tab.q_origin @ u.coeffs[0]
    values[0] = (4.0 / (h0 * h0)) * (1.0 + tab.rec.xi) * qv * qv
    integrals = 0.5 * disc.h * (values @ tab.rec_weights)
    return PhiSamples(values, integrals)


def sweep_g(phi: PhiSamples) -> GSweep:
    """Right-to-left ``g`` recursion anchored at ``g(b) = 1`` (in log space)."""
    suffix = np.cumsum(phi.integrals[::-1])[::-1]
    log_g_nodes = np.concatenate([-suffix, [0.0]])
    g_hat, floored = _exp_floor(log_g_nodes[1:])
    return GSweep(log_g_nodes, g_hat, floored)


def _log_g_at(phi: PhiSamples, log_g_nodes, disc: Discretization, pt: PointTables):
    # g is nondecreasing, so log g stays between the two node values of its element
    partial = 0.5 * disc.h[:, None] * (phi.values @ pt.upper.T)
    return np.clip(log_g_nodes[1:, None] - partial, log_g_nodes[:-1, None], log_g_nodes[1:, None])


def _bracket_z(partial, offset, g_left, g_here):
    """Keep ``int_a^r g`` within ``[g(a), g(r)] * (r - a)``.

    Exact for the monotone ``g``; only active when the interpolant of a
    violently varying ``g`` overshoots.
    """
    return np.minimum(np.maximum(partial, offset * g_left), offset * g_here)


def g_values(phi: PhiSamples, gs: GSweep, disc: Discretization) -> GValues:
    tab = disc.tables
    g_rec, f1 = _exp_floor(_log_g_at(phi, gs.log_g_nodes, disc, tab.rec))
    g_vol, f2 = _exp_floor(_log_g_at(phi, gs.log_g_nodes, disc, tab.vol))
    g_nodes, f0 = _exp_floor(gs.log_g_nodes)
    return GValues(g_rec, g_vol, float(g_nodes[0]), gs.deep_collapse or f0 or f1 or f2, g_nodes)


def sweep_z_tilde_g(gv: GValues, disc: Discretization) -> ZValues:
    tab = disc.tables
    h = disc.h
    dz = 0.5 * h * (gv.rec @ tab.rec_weights)
    partial = 0.5 * h[:, None] * (gv.rec @ tab.vol.lower.T)
    r_vol = disc.r_vol
    if gv.g_nodes is not None:
        gn = gv.g_nodes
        dz = _bracket_z(dz, h, gn[:-1], gn[1:])
        partial = _bracket_z(partial, r_vol - disc.a[:, None], gn[:-1, None], gv.vol)
    z_nodes = np.concatenate([[0.0], np.cumsum(dz)])
    z_vol = z_nodes[:-1, None] + partial
    gt_vol = z_vol / r_vol
    gtr_vol = (gv.vol - gt_vol) / r_vol
    gt_nodes = np.empty_like(z_nodes)
    gt_nodes[0] = gv.g0
    gt_nodes[1:] = z_nodes[1:] / disc.mesh.nodes[1:]
    return ZValues(z_nodes, z_vol, gt_vol, gtr_vol, gt_nodes)


def u_hat_values(u: PolyField, U_b: float) -> np.ndarray:
    """Upwind traces: the right neighbour's left value, and ``U_b`` at ``r = b``."""
    left, _ = u.endpoint_values()
    return np.concatenate([left[1:], [float(U_b)]])


@dataclass
class ReconstructedState:
    """All reconstructed quantities for one ``u_h``.

    Volume samples (shape ``(N, q_vol)``) are at the ``q_vol`` Gauss nodes
    ``r``; nodal arrays have length ``N + 1``.
    """

    disc: Discretization
    coeffs: np.ndarray
    r: np.ndarray
    u: np.ndarray
    w: np.ndarray
    u_tilde: np.ndarray
    g: np.ndarray
    z: np.ndarray
    g_tilde: np.ndarray
    g_tilde_r: np.ndarray
    phi: PhiSamples
    g_rec: np.ndarray
    w_nodes: np.ndarray
    z_nodes: np.ndarray
    log_g_nodes: np.ndarray
    g_tilde_nodes: np.ndarray
    u_left: np.ndarray
    u_right: np.ndarray
    U_b: float
    deep_collapse: bool

    @property
    def g0(self) -> float:
        return float(max(np.exp(self.log_g_nodes[0]), TINY))

    @property
    def g_nodes(self) -> np.ndarray:
        return _exp_floor(self.log_g_nodes)[0]

    @property
    def u_tilde0(self) -> float:
        return float(self.u_left[0])

    def at_reference(self, xi) -> dict:
        """Reconstructed fields at reference points ``xi`` in every element.

        Returns arrays of shape ``(N, len(xi))``.
        """
        pt = point_tables(self.disc.k, self.disc.q_rec, xi)
        a, h = self.disc.a, self.disc.h
        r = a[:, None] + 0.5 * h[:, None] * (pt.xi[None, :] + 1.0)
        return self._evaluate(np.arange(self.disc.N)[:, None], r, pt)

    def sample(self, r, side: str = "left") -> dict:
        """Reconstructed fields at physical points ``r``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        mesh = self.disc.mesh
        idx = mesh.locate(r, side)
        xi = 2.0 * (r - mesh.nodes[idx]) / mesh.widths[idx] - 1.0
        xi = np.clip(xi, -1.0, 1.0)
        k, q_rec = self.disc.k, self.disc.q_rec
        first = idx == 0
        base = _build_point_tables(k, q_rec, tuple(xi.tolist()), with_origin=False)
        origin = np.zeros_like(base.psi)
        if np.any(first):
            origin[first] = _build_point_tables(k, q_rec, tuple(xi[first].tolist())).origin
        pt = PointTables(xi, base.psi, base.antider, origin, base.lower, base.upper)
        # pointwise rows: table row p pairs with element idx[p]
        return self._evaluate(idx, r, pt)

    def _evaluate(self, idx, r, pt: PointTables):
        C = self.coeffs
        disc = self.disc
        rows = idx.ndim == 1
        if rows:
            def contract(tab, data):
                return np.einsum("pj,pj->p", tab, data[idx])
            s2h, shh, hh = disc.sqrt_2_over_h[idx], disc.sqrt_h_over_2[idx], disc.h[idx]
            w_left, z_left = self.w_nodes[idx], self.z_nodes[idx]
            log_right = self.log_g_nodes[idx + 1]
            log_left = self.log_g_nodes[idx]
            a_left = disc.a[idx]
            on_first = idx == 0
        else:
            def contract(tab, data):
                return data @ tab.T
            s2h = disc.sqrt_2_over_h[:, None]
            shh = disc.sqrt_h_over_2[:, None]
            hh = disc.h[:, None]
            w_left, z_left = self.w_nodes[:-1, None], self.z_nodes[:-1, None]
            log_right = self.log_g_nodes[1:, None]
            log_left = self.log_g_nodes[:-1, None]
            a_left = disc.a[:, None]
            on_first = np.zeros(r.shape, dtype=bool)
            on_first[0] = True
        u = s2h * contract(pt.psi, C)
        w = w_left + shh * contract(pt.antider, C)
        with np.errstate(divide="ignore", invalid="ignore"):
            u_tilde = np.where(on_first, 0.0, w / r)
        origin_vals = disc.sqrt_2_over_h[0] * (
            pt.origin @ C[0] if rows else (C[0] @ pt.origin.T)[None, :]
        )
        u_tilde = np.where(on_first, origin_vals, u_tilde)
        log_g = np.clip(log_right - 0.5 * hh * contract(pt.upper, self.phi.values),
                        log_left, log_right)
        g = np.exp(np.maximum(log_g, LOG_TINY))
        g_left = np.exp(np.maximum(log_left, LOG_TINY))
        z = z_left + _bracket_z(0.5 * hh * contract(pt.lower, self.g_rec), r - a_left, g_left, g)
        with np.errstate(divide="ignore", invalid="ignore"):
            g_tilde = np.where(r > 0, z / r, self.g0)
            mass = np.where(r > 0, 0.5 * r * (1.0 - g_tilde / g), 0.0)
        return {
            "r": r,
            "u": u,
            "u_tilde": u_tilde,
            "g": g,
            "g_tilde": g_tilde,
            "w": w,
            "z": z,
            "mass_aspect": mass,
        }


def reconstruct(u: PolyField, U_b: float, disc: Discretization | None = None):
    """Eliminate all traces and reconstruct ``w, u~, g, z, g~, g~_r`` from ``u_h``.

    Returns ``(TraceSet, ReconstructedState)``.
    """
    disc = discretization_for(u, disc)
    ws = sweep_w(u)
    tu = tilde_u_values(u, ws, disc)
    phi = phi_samples(u, tu, disc)
    gs = sweep_g(phi)
    gv = g_values(phi, gs, disc)
    zv = sweep_z_tilde_g(gv, disc)
    u_hat = u_hat_values(u, U_b)
    left, right = u.endpoint_values()
    traces = TraceSet(ws.w_hat.copy(), zv.z_hat.copy(), gs.g_hat, u_hat)
    state = ReconstructedState(
        disc=disc,
        coeffs=u.coeffs,
        r=disc.r_vol,
        u=disc.sqrt_2_over_h[:, None] * (u.coeffs @ disc.tables.vol.psi.T),
        w=ws.w_nodes[:-1, None] + disc.sqrt_h_over_2[:, None] * (u.coeffs @ disc.tables.vol.antider.T),
        u_tilde=tu.vol,
        g=gv.vol,
        z=zv.vol,
        g_tilde=zv.g_tilde_vol,
        g_tilde_r=zv.g_tilde_r_vol,
        phi=phi,
        g_rec=gv.rec,
        w_nodes=ws.w_nodes,
        z_nodes=zv.z_nodes,
        log_g_nodes=gs.log_g_nodes,
        g_tilde_nodes=zv.g_tilde_nodes,
        u_left=left,
        u_right=right,
        U_b=float(U_b),
        deep_collapse=gv.deep_collapse,
    )
    return traces, state
