"""Broken polynomial fields on a mesh and their skeleton traces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .mesh import Mesh
from .quadrature import PolyCoeffs, _as_values, basis_table, gauss_rule


@dataclass
class PolyField:
    """An element of ``V_h^k``: one orthonormal coefficient block per element.

    ``coeffs`` has shape ``(N, k + 1)`` and is C-contiguous, so ``flat`` is a
    view usable directly as the ODE state vector.
    """

    mesh: Mesh
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=float)
        if c.ndim == 1:
            c = c.reshape(self.mesh.N, -1)
        if c.ndim != 2 or c.shape[0] != self.mesh.N or c.shape[1] < 1:
            raise ConfigurationError(
                f"expected {self.mesh.N} coefficient blocks, got array of shape {c.shape}"
            )
        self.coeffs = c

    @property
    def k(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    @classmethod
    def zeros(cls, mesh: Mesh, k: int) -> "PolyField":
        return cls(mesh, np.zeros((mesh.N, k + 1)))

    @classmethod
    def from_flat(cls, mesh: Mesh, flat) -> "PolyField":
        return cls(mesh, np.asarray(flat, dtype=float).reshape(mesh.N, -1))

    def copy(self) -> "PolyField":
        return PolyField(self.mesh, self.coeffs.copy())

    def element(self, i: int) -> PolyCoeffs:
        return PolyCoeffs(self.coeffs[i], (self.mesh.nodes[i], self.mesh.nodes[i + 1]))

    def endpoint_values(self):
        """``(u_h|_{I_i}(r_{i-1}), u_h|_{I_i}(r_i))`` for every element."""
        k = self.k
        scale = np.sqrt(2.0 / self.mesh.widths)
        left = basis_table(k, np.array([-1.0]))[0]
        right = basis_table(k, np.array([1.0]))[0]
        return scale * (self.coeffs @ left), scale * (self.coeffs @ right)

    def __call__(self, r, side: str = "left"):
        return field_eval(self, r, side)


def project(f, mesh: Mesh, k: int, q: int | None = None) -> PolyField:
    """Elementwise left Gauss-Radau projection of ``f`` (vectorized)."""
    if k < 0:
        raise ConfigurationError("degree must be nonnegative")
    rule = gauss_rule(q if q is not None else 2 * k + 3)
    h = mesh.widths
    a = mesh.nodes[:-1]
    x = a[:, None] + 0.5 * h[:, None] * (rule.nodes[None, :] + 1.0)
    fx = _as_values(f, x)
    psi = basis_table(k, rule.nodes)
    coeffs = np.empty((mesh.N, k + 1))
    coeffs[:, :k] = np.sqrt(0.5 * h)[:, None] * ((fx * rule.weights) @ psi[:, :k])
    left = basis_table(k, np.array([-1.0]))[0]
    fa = _as_values(f, a)
    coeffs[:, k] = (fa / np.sqrt(2.0 / h) - coeffs[:, :k] @ left[:k]) / left[k]
    return PolyField(mesh, coeffs)


def field_eval(u: PolyField, r, side: str = "left"):
    """Value of ``u`` at ``r``; ``side`` picks the element at interior nodes."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0.0) or np.any(r_arr > u.mesh.b):
        raise ValueError(f"r outside [0, {u.mesh.b}]")
    idx = u.mesh.locate(r_arr, side)
    a = u.mesh.nodes[idx]
    h = u.mesh.widths[idx]
    xi = 2.0 * (r_arr - a) / h - 1.0
    psi = basis_table(u.k, xi)
    vals = np.sqrt(2.0 / h) * np.sum(psi * u.coeffs[idx], axis=-1)
    return float(vals) if vals.ndim == 0 else vals


def l2_norm(u: PolyField) -> float:
    """Broken L2 norm; equals the coefficient norm by orthonormality."""
    return float(np.sqrt(np.dot(u.flat, u.flat)))


def l2_norm_quadrature(u: PolyField, q: int | None = None) -> float:
    """Broken L2 norm by elementwise Gauss quadrature (consistency check)."""
    rule = gauss_rule(q if q is not None else u.k + 1)
    psi = basis_table(u.k, rule.nodes)
    vals = (u.coeffs @ psi.T) * np.sqrt(2.0 / u.mesh.widths)[:, None]
    per_elem = 0.5 * u.mesh.widths * ((vals * vals) @ rule.weights)
    return float(np.sqrt(per_elem.sum()))


@dataclass
class TraceSet:
    """Skeleton traces.

    ``w_hat`` and ``z_hat`` live on ``r_0 .. r_{N-1}``; ``g_hat`` and ``u_hat``
    on ``r_1 .. r_N``.
    """

    w_hat: np.ndarray
    z_hat: np.ndarray
    g_hat: np.ndarray
    u_hat: np.ndarray
