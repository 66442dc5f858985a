"""Semiclassical hbar-expansions of Regge trajectories with mass renormalization."""

from .closed_form import alpha4_powerlaw, powerlaw_terms
from .engine import CoeffTable, Expansion, alpha_step, evaluate, expand, laurent_row, zeroth_order
from .errors import (
    DependencyOrder,
    DomainError,
    GridTooSmall,
    NoConvergence,
    NoOrbit,
    OrbitLost,
    OutOfRange,
    ReggeError,
    Unstable,
)
from .oracle import EigenResult, OracleConfig, exact_regge, solve_eigenvalue
from .potential import GeneralTaylor, Orbit, PowerLaw, build_orbit, find_orbit_radius
from .renorm import (
    MassExpansion,
    Scheme,
    SchemeResult,
    SolverConfig,
    renorm_expand,
    solve_scheme1,
    solve_scheme2,
)

__version__ = "0.1.0"
