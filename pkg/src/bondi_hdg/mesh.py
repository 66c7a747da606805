"""Radial meshes ``0 = r_0 < r_1 < ... < r_N = b``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True, eq=False)
class Mesh:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise ConfigurationError("a mesh needs at least two nodes")
        if nodes[0] != 0.0:
            raise ConfigurationError("the first mesh node must be r = 0")
        if not np.all(np.diff(nodes) > 0):
            raise ConfigurationError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def N(self) -> int:
        return len(self.nodes) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def h(self) -> float:
        return float(np.max(self.widths))

    @property
    def h_min(self) -> float:
        return float(np.min(self.widths))

    def locate(self, r, side: str = "left") -> np.ndarray:
        """Element index (0-based) containing each ``r``.

        At an interior node, ``side="left"`` selects the element to the left of
        the node and ``side="right"`` the one to its right.  The end points
        always map to the first and last element respectively.
        """
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.0) or np.any(r > self.b):
            raise ValueError(f"evaluation point outside [0, {self.b}]")
        if side == "left":
            idx = np.searchsorted(self.nodes, r, side="left") - 1
        elif side == "right":
            idx = np.searchsorted(self.nodes, r, side="right") - 1
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return np.clip(idx, 0, self.N - 1)


def build_uniform(b: float, N: int) -> Mesh:
    """Uniform mesh with nodes ``i * b / N`` (non-cumulative)."""
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 1:
        raise ConfigurationError(f"N must be a positive integer, got {N!r}")
    if not (np.isfinite(b) and b > 0):
        raise ConfigurationError(f"outer radius must be positive, got {b!r}")
    nodes = np.arange(N + 1) * float(b) / N
    nodes[-1] = float(b)
    return Mesh(nodes)
