"""Initial/boundary data presets.

Each preset gives ``u0 = (r u~0)_r`` in closed form together with the
averaged profile ``u~0`` it was derived from.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Scenario:
    name: str
    b: float
    u0: Callable
    U_b: Callable
    default_T: float
    default_snapshots: tuple
    u_tilde0: Callable | None = None
    notes: str = ""
    params: dict = field(default_factory=dict)


def _sech2(x):
    return 1.0 / np.cosh(x) ** 2


def example1(snapshots=(0.0, 0.5, 2.0, 5.0)) -> Scenario:
    """Steep large-data profile ``u~0 = 0.45 tanh(3 (r - 5))`` on ``[0, 10]``."""
    amp, steep, centre = 0.45, 3.0, 5.0

    def u_tilde0(r):
        return amp * np.tanh(steep * (np.asarray(r, dtype=float) - centre))

    def u0(r):
        r = np.asarray(r, dtype=float)
        x = steep * (r - centre)
        return amp * np.tanh(x) + amp * steep * r * _sech2(x)

    ub = float(u0(10.0))
    return Scenario(
        name="example1", b=10.0, u0=u0, U_b=lambda t: ub, default_T=max(snapshots),
        default_snapshots=tuple(snapshots), u_tilde0=u_tilde0,
        notes="large data, rapid collapse; accuracy study at T=0.5",
        params={"amplitude": amp, "steepness": steep, "centre": centre},
    )


def example2() -> Scenario:
    """Milder large data ``u~0 = tanh(m (r - r_c))``, ``r_c = 6``, ``m = 1/5.1``."""
    rc, m = 6.0, 1.0 / 5.1

    def u_tilde0(r):
        return np.tanh(m * (np.asarray(r, dtype=float) - rc))

    def u0(r):
        r = np.asarray(r, dtype=float)
        x = m * (r - rc)
        return np.tanh(x) + m * r * _sech2(x)

    ub = float(u0(10.0))
    snaps = (0.0, 5.0, 10.0, 20.0)
    return Scenario(
        name="example2", b=10.0, u0=u0, U_b=lambda t: ub, default_T=snaps[-1],
        default_snapshots=snaps, u_tilde0=u_tilde0,
        notes="slower collapse, long-time evolution", params={"r_c": rc, "m": m},
    )


def example3() -> Scenario:
    """Gaussian pulse ``u~0 = A r^2 exp(-(r - r0)^2 / sigma^2)`` on ``[0, 20]``."""
    A, r0, sigma = 8e-3, 8.0, 1.5

    def u_tilde0(r):
        r = np.asarray(r, dtype=float)
        return A * r * r * np.exp(-((r - r0) ** 2) / sigma**2)

    def u0(r):
        r = np.asarray(r, dtype=float)
        return A * np.exp(-((r - r0) ** 2) / sigma**2) * (3.0 * r * r - 2.0 * r**3 * (r - r0) / sigma**2)

    snaps = (0.0, 20.0, 60.0)
    return Scenario(
        name="example3", b=20.0, u0=u0, U_b=lambda t: 0.0, default_T=60.0,
        default_snapshots=snaps, u_tilde0=u_tilde0,
        notes="smooth weak-field pulse, zero inflow", params={"A": A, "r0": r0, "sigma": sigma},
    )


def vacuum(b: float = 10.0, T: float = 1.0) -> Scenario:
    return Scenario(
        name="vacuum", b=b, u0=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        U_b=lambda t: 0.0, default_T=T, default_snapshots=(0.0, T),
        u_tilde0=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    )


def constant(c: float = 1.0, b: float = 10.0, T: float = 1.0) -> Scenario:
    c = float(c)
    return Scenario(
        name="constant", b=b, u0=lambda r: np.full_like(np.asarray(r, dtype=float), c),
        U_b=lambda t: c, default_T=T, default_snapshots=(0.0, T),
        u_tilde0=lambda r: np.full_like(np.asarray(r, dtype=float), c), params={"c": c},
    )


SCENARIOS = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "vacuum": vacuum,
    "constant": constant,
}


def get_scenario(name: str, **kwargs) -> Scenario:
    try:
        factory = SCENARIOS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}") from None
    return factory(**kwargs)
