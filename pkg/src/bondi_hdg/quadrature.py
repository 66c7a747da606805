"""Legendre basis, Gauss-Legendre rules and elementwise polynomial calculus.

Polynomials on an element ``(a, c)`` are stored in the *physically*
orthonormal Legendre basis

    phi_m(r) = sqrt(2 / h) * psi_m(xi),   psi_m(xi) = sqrt((2m + 1) / 2) * P_m(xi),

with ``h = c - a`` and ``xi = 2 (r - a) / h - 1``.  The element mass matrix is
the identity, so the L2 norm of a polynomial equals the Euclidean norm of its
coefficient vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError

MAX_GAUSS_POINTS = 64


@dataclass(frozen=True)
class QuadRule:
    """Gauss-Legendre rule on the reference interval [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def npoints(self) -> int:
        return len(self.nodes)

    @property
    def exact_degree(self) -> int:
        """Highest polynomial degree integrated exactly."""
        return 2 * len(self.nodes) - 1

    def integrate(self, f, a=-1.0, b=1.0):
        """Apply the rule to ``f`` on ``[a, b]`` (``f`` must accept arrays)."""
        half = 0.5 * (b - a)
        x = a + half * (self.nodes + 1.0)
        return half * float(np.dot(self.weights, _as_values(f, x)))


def legendre_table(n: int, x) -> np.ndarray:
    """Values ``P_0(x) .. P_n(x)`` as an array of shape ``(len(x), n + 1)``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (n + 1,))
    out[..., 0] = 1.0
    if n >= 1:
        out[..., 1] = x
    for m in range(1, n):
        out[..., m + 1] = ((2 * m + 1) * x * out[..., m] - m * out[..., m - 1]) / (m + 1)
    return out


def legendre_derivative_table(n: int, x) -> np.ndarray:
    """Derivatives ``P_0'(x) .. P_n'(x)``, shape ``(len(x), n + 1)``."""
    x = np.asarray(x, dtype=float)
    p = legendre_table(n, x)
    out = np.zeros_like(p)
    # P'_{m+1} = P'_{m-1} + (2m + 1) P_m
    if n >= 1:
        out[..., 1] = 1.0
    for m in range(1, n):
        out[..., m + 1] = out[..., m - 1] + (2 * m + 1) * p[..., m]
    return out


def _normalization(n: int) -> np.ndarray:
    return np.sqrt((2.0 * np.arange(n + 1) + 1.0) / 2.0)


def basis_table(n: int, x) -> np.ndarray:
    """Reference-orthonormal basis ``psi_m(x)`` for ``m <= n``."""
    return legendre_table(n, x) * _normalization(n)


def basis_derivative_table(n: int, x) -> np.ndarray:
    return legendre_derivative_table(n, x) * _normalization(n)


def basis_antiderivative_table(n: int, x) -> np.ndarray:
    """``A_m(x) = int_{-1}^x psi_m`` for ``m <= n``.

    Uses ``int_{-1}^x P_m = (P_{m+1} - P_{m-1}) / (2m + 1)`` for ``m >= 1``.
    """
    x = np.asarray(x, dtype=float)
    p = legendre_table(n + 1, x)
    out = np.empty(x.shape + (n + 1,))
    out[..., 0] = x + 1.0
    for m in range(1, n + 1):
        out[..., m] = (p[..., m + 1] - p[..., m - 1]) / (2 * m + 1)
    return out * _normalization(n)


@lru_cache(maxsize=None)
def gauss_rule(q: int) -> QuadRule:
    """Gauss-Legendre nodes and weights with ``q`` points.

    Roots of ``P_q`` are found by Newton iteration from Chebyshev-type initial
    guesses; the rule is symmetrized so that odd moments vanish exactly.
    """
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)):
        raise ConfigurationError(f"quadrature order must be an integer, got {q!r}")
    if not 1 <= q <= MAX_GAUSS_POINTS:
        raise ConfigurationError(f"quadrature order must lie in [1, {MAX_GAUSS_POINTS}], got {q}")
    q = int(q)
    half = (q + 1) // 2
    i = np.arange(1, half + 1)
    x = np.cos(np.pi * (i - 0.25) / (q + 0.5))
    for _ in range(100):
        p = legendre_table(q, x)
        pq, pqm1 = p[:, q], p[:, q - 1]
        dp = q * (x * pq - pqm1) / (x * x - 1.0)
        dx = pq / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p = legendre_table(q, x)
    dp = q * (x * p[:, q] - p[:, q - 1]) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    if q % 2:
        # the middle root is exactly zero
        x[-1] = 0.0
    nodes = np.concatenate([-x, x[: q // 2][::-1]]) + 0.0
    weights = np.concatenate([w, w[: q // 2][::-1]])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes, weights)


def _as_values(f, x):
    vals = np.asarray(f(x), dtype=float)
    if vals.shape != np.shape(x):
        vals = np.broadcast_to(vals, np.shape(x)).astype(float)
    return vals


@dataclass(frozen=True)
class PolyCoeffs:
    """A polynomial of degree ``k`` on ``element`` in the orthonormal basis."""

    coeffs: np.ndarray
    element: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        a, c = self.element
        if not c > a:
            raise ConfigurationError(f"degenerate element {self.element}")
        object.__setattr__(self, "element", (float(a), float(c)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def width(self) -> float:
        return self.element[1] - self.element[0]

    def to_reference(self, r):
        a, c = self.element
        return 2.0 * (np.asarray(r, dtype=float) - a) / (c - a) - 1.0

    def __call__(self, r):
        return poly_eval(self, r)


def poly_eval(p: PolyCoeffs, r):
    """Evaluate ``p`` at ``r`` (scalar or array) inside its element."""
    xi = p.to_reference(r)
    vals = basis_table(p.degree, xi) @ p.coeffs
    vals = vals * np.sqrt(2.0 / p.width)
    return float(vals) if np.ndim(vals) == 0 else vals


def poly_derivative(p: PolyCoeffs) -> PolyCoeffs:
    """Exact derivative, returned with the same degree (top coefficient zero)."""
    k = p.degree
    h = p.width
    norm = _normalization(k)
    leg = p.coeffs * norm  # coefficients on P_m(xi), up to sqrt(2/h)
    d = np.zeros(k + 1)
    # d/dxi P_m = sum_{j < m, m - j odd} (2j + 1) P_j
    for m in range(1, k + 1):
        for j in range(m - 1, -1, -2):
            d[j] += (2 * j + 1) * leg[m]
    d *= 2.0 / h
    return PolyCoeffs(d / norm, p.element)


def poly_antiderivative(p: PolyCoeffs) -> PolyCoeffs:
    """Exact antiderivative ``P`` with ``P(a) = 0`` and ``P' = p`` (degree k + 1)."""
    k = p.degree
    h = p.width
    norm = _normalization(k + 1)
    leg = p.coeffs * norm[: k + 1]
    out = np.zeros(k + 2)
    out[0] += leg[0]
    out[1] += leg[0]
    for m in range(1, k + 1):
        out[m + 1] += leg[m] / (2 * m + 1)
        out[m - 1] -= leg[m] / (2 * m + 1)
    # coefficients on P_n(xi) of int_{-1}^{xi}; rescale to phi_n on the element
    return PolyCoeffs(out / norm * (0.5 * h), p.element)


def radau_project(f, element, k: int, q: int | None = None) -> PolyCoeffs:
    """Left Gauss-Radau projection onto ``P^k(element)``.

    Matches ``f`` at the left endpoint and reproduces its moments against
    ``P^{k-1}``.  Moments are computed with a ``q``-point Gauss rule
    (default ``2k + 3``).
    """
    if k < 0:
        raise ConfigurationError("degree must be nonnegative")
    a, c = float(element[0]), float(element[1])
    h = c - a
    rule = gauss_rule(q if q is not None else 2 * k + 3)
    psi = basis_table(k, rule.nodes)
    fx = _as_values(f, a + 0.5 * h * (rule.nodes + 1.0))
    coeffs = np.empty(k + 1)
    coeffs[:k] = np.sqrt(0.5 * h) * ((rule.weights * fx) @ psi[:, :k])
    left = basis_table(k, np.array([-1.0]))[0] * np.sqrt(2.0 / h)
    fa = float(_as_values(f, np.array([a]))[0])
    coeffs[k] = (fa - left[:k] @ coeffs[:k]) / left[k]
    return PolyCoeffs(coeffs, (a, c))


# ---------------------------------------------------------------------------
# Exact rational polynomial arithmetic for tables near the origin.


@lru_cache(maxsize=None)
def shifted_legendre_monomials(m: int) -> tuple:
    """Coefficients of ``P_m(t - 1)`` in powers of ``t`` as exact fractions."""
    prev = [Fraction(1)]
    if m == 0:
        return tuple(prev)
    cur = [Fraction(-1), Fraction(1)]
    for n in range(1, m):
        # P_{n+1} = ((2n + 1) (t - 1) P_n - n P_{n-1}) / (n + 1)
        nxt = [Fraction(0)] * (n + 2)
        for j, cj in enumerate(cur):
            nxt[j + 1] += (2 * n + 1) * cj
            nxt[j] -= (2 * n + 1) * cj
        for j, cj in enumerate(prev):
            nxt[j] -= n * cj
        prev, cur = cur, [v / (n + 1) for v in nxt]
    return tuple(cur)


def eval_fraction_poly(coeffs, t) -> float:
    """Evaluate exactly at the binary64 value ``t`` and round once."""
    tt = Fraction(float(t))
    acc = Fraction(0)
    for cj in reversed(coeffs):
        acc = acc * tt + cj
    return float(acc)


def antiderivative_coeffs(coeffs, h):
    """Vectorized :func:`poly_antiderivative` over a ``(..., k+1)`` coefficient array."""
    coeffs = np.asarray(coeffs, dtype=float)
    k = coeffs.shape[-1] - 1
    norm = _normalization(k + 1)
    leg = coeffs * norm[: k + 1]
    out = np.zeros(coeffs.shape[:-1] + (k + 2,))
    out[..., 0] += leg[..., 0]
    out[..., 1] += leg[..., 0]
    for m in range(1, k + 1):
        out[..., m + 1] += leg[..., m] / (2 * m + 1)
        out[..., m - 1] -= leg[..., m] / (2 * m + 1)
    return out / norm * (0.5 * np.asarray(h, dtype=float))[..., None]
