"""HDG solver for the spherically symmetric Einstein-scalar system in Bondi gauge.

The evolution variable is ``u = (r phi)_r``.  Everything else (the averaged
field, both metric coefficients and the Bondi mass) is reconstructed from the
piecewise polynomial ``u_h`` by exact elementwise sweeps.
"""
from .errors import ConfigurationError, InvariantViolation, NumericalBlowup
from .field import PolyField, TraceSet, l2_norm, project
from .kernels import available_backends, get_backend, set_backend, use_backend
from .mesh import Mesh, build_uniform
from .operator import assemble_rhs
from .quadrature import gauss_rule, radau_project
from .reconstruction import ReconstructedState, reconstruct
from .scenarios import SCENARIOS, Scenario, get_scenario
from .tables import Discretization
from .timestepping import TimeConfig, cfl_dt, integrate, rk4_step

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "InvariantViolation", "NumericalBlowup",
    "PolyField", "TraceSet", "l2_norm", "project",
    "available_backends", "get_backend", "set_backend", "use_backend",
    "Mesh", "build_uniform", "assemble_rhs", "gauss_rule", "radau_project",
    "ReconstructedState", "reconstruct", "SCENARIOS", "Scenario", "get_scenario",
    "Discretization", "TimeConfig", "cfl_dt", "integrate", "rk4_step",
]
