"""Potentials, circular orbits and the Taylor data fed to the recurrences.

A potential is represented either by a power law ``V(r) = A r**v`` or by a
general smooth function that supplies exact derivatives on demand.  The
classical circular orbit at energy ``E`` sits at the radius ``r0`` solving

    E = V(r0) + r0 V'(r0) / 2,

and everything downstream is expanded in ``x = (r - r0) / r0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, NoOrbit, Unstable

DerivativeOracle = Callable[[float, int], Sequence[float]]


@dataclass(frozen=True)
class PowerLaw:
    """``V(r) = A * r**v`` on its confining branch.

    Either ``A > 0, v > 0`` or ``A < 0, -2 < v < 0``.
    """

    A: float
    v: float

    def __post_init__(self):
        ok = (self.A > 0 and self.v > 0) or (self.A < 0 and -2 < self.v < 0)
        if not ok:
            raise DomainError(
                f"power law A={self.A}, v={self.v} is not on a confining branch"
            )

    @property
    def label(self) -> str:
        return f"powerlaw(A={self.A:g}, v={self.v:g})"

    def value(self, r):
        return self.A * np.power(r, self.v)

    def derivatives(self, r: float, order: int) -> list[float]:
        out = []
        coef = self.A
        for k in range(order + 1):
            out.append(coef * r ** (self.v - k))
            coef *= self.v - k
        return out

    def taylor(self, r0: float, count: int) -> np.ndarray:
        # r**v = r0**v (1 + x)**v, so V_i = A r0**v binom(v, i)
        out = np.empty(count)
        c = self.A * r0**self.v
        for i in range(count):
            out[i] = c
            c *= (self.v - i) / (i + 1)
        return out


@dataclass(frozen=True)
class GeneralTaylor:
    """A smooth potential given through an exact derivative oracle.

    Parameters
    ----------
    derivatives : callable
        ``derivatives(r, order)`` returns ``[V(r), V'(r), ..., V^(order)(r)]``.
    name : str
        Label used in reports.
    func : callable, optional
        Vectorized ``V(r)``; falls back to the oracle point by point.
    """

    derivatives: DerivativeOracle
    name: str = "general"
    func: Callable | None = field(default=None, compare=False)

    @property
    def label(self) -> str:
        return self.name

    def value(self, r):
        if self.func is not None:
            return self.func(r)
        return np.vectorize(lambda s: float(self.derivatives(float(s), 0)[0]))(r)

    def taylor(self, r0: float, count: int) -> np.ndarray:
        d = self.derivatives(r0, count - 1)
        return np.array(
            [r0**i * float(d[i]) / math.factorial(i) for i in range(count)]
        )

    @classmethod
    def from_sympy(cls, expr, symbol, name: str | None = None) -> "GeneralTaylor":
        """Build the derivative oracle from a sympy expression in ``symbol``."""
        import sympy as sp

        cache: list = [expr]

        def derivatives(r: float, order: int) -> list[float]:
            while len(cache) <= order:
                cache.append(sp.diff(cache[-1], symbol))
            return [float(d.subs(symbol, r)) for d in cache[: order + 1]]

        func = sp.lambdify(symbol, expr, "numpy")
        return cls(derivatives=derivatives, name=name or str(expr), func=func)


PotentialSpec = Union[PowerLaw, GeneralTaylor]


@dataclass(frozen=True)
class Orbit:
    """Circular-orbit data at one energy.

    ``V`` holds the Taylor coefficients of the potential in ``x`` and ``a``
    the normalized coefficients of the effective well entering the
    zeroth-order row.  ``mass_used`` may be complex when the orbit is built
    for complex-step differentiation.
    """

    energy: float
    r0: float
    alpha0: complex | float
    V: np.ndarray
    omega: complex | float
    a: np.ndarray
    mass_used: complex | float

    @property
    def i_max(self) -> int:
        return len(self.V) - 1


def _effective_terms(pot: PotentialSpec, r: float) -> tuple[float, float, float]:
    """Return ``V + r V'/2``, its r-derivative, and ``V'`` at ``r``."""
    v0, v1, v2 = pot.derivatives(r, 2)[:3]
    return v0 + 0.5 * r * v1, 1.5 * v1 + 0.5 * r * v2, v1


def _stable_at(pot: PotentialSpec, r: float) -> bool:
    V = pot.taylor(r, 3)
    return V[1] > 0 and V[2] + 1.5 * V[1] > 0


def _newton_bracketed(pot, E, lo, hi, tol, maxiter=200):
    glo = _effective_terms(pot, lo)[0] - E
    if glo > 0:
        lo, hi = hi, lo
    r = 0.5 * (lo + hi)
    for _ in range(maxiter):
        g, dg, _ = _effective_terms(pot, r)
        g -= E
        if abs(g) <= tol * abs(E) or abs(hi - lo) <= 1e-15 * abs(r):
            return r
        if g < 0:
            lo = r
        else:
            hi = r
        step = g / dg if dg != 0 else math.inf
        r_new = r - step
        if not (min(lo, hi) < r_new < max(lo, hi)):
            r_new = 0.5 * (lo + hi)
        r = r_new
    return r


def find_orbit_radius(pot: PotentialSpec, E: float, tol: float = 1e-13) -> float:
    """Radius of the stable circular orbit at energy ``E``.

    Power laws use the closed form ``r0 = (2E / (A (v + 2)))**(1/v)``.  For a
    general potential the root of ``V(r) + r V'(r)/2 - E`` is bracketed by a
    geometric scan (widened once if needed) and polished by safeguarded Newton.

    Raises
    ------
    NoOrbit
        If no root is bracketed.
    Unstable
        If every root found fails ``V2 + 3/2 V1 > 0``.
    """
    if isinstance(pot, PowerLaw):
        base = 2.0 * E / (pot.A * (pot.v + 2.0))
        if not base > 0:
            raise NoOrbit(f"no circular orbit for {pot.label} at E={E}")
        return base ** (1.0 / pot.v)

    for lo_exp, hi_exp in ((-6, 6), (-12, 12)):
        grid = np.logspace(lo_exp, hi_exp, 60 * (hi_exp - lo_exp) + 1)
        g = np.array([_effective_terms(pot, r)[0] - E for r in grid])
        flips = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]
        roots = [_newton_bracketed(pot, E, grid[i], grid[i + 1], tol) for i in flips]
        for r in roots:
            if _stable_at(pot, r):
                return r
        if roots:
            raise Unstable(f"orbit(s) at E={E} for {pot.label} are not stable")
    raise NoOrbit(f"no circular orbit bracketed for {pot.label} at E={E}")


def build_orbit(
    pot: PotentialSpec, E: float, mass, i_max: int = 12, r0: float | None = None
) -> Orbit:
    """Assemble the circular-orbit data consumed by the recurrences.

    ``V`` is returned for ``i = 0..i_max`` and ``a`` for ``i = 0..i_max-2``.
    For a target order ``N`` use ``i_max >= 2N + 4``.
    """
    if r0 is None:
        r0 = find_orbit_radius(pot, E)
    V = pot.taylor(r0, i_max + 1)
    V.setflags(write=False)
    curvature = float(V[2] + 1.5 * V[1])
    if not (np.real(mass) > 0 and V[1] > 0 and curvature > 0):
        raise Unstable(
            f"unstable orbit at E={E}: V1={V[1]:.6g}, V2+3/2V1={curvature:.6g}, "
            f"mass={mass}"
        )
    omega = (2 * mass * curvature) ** 0.5
    # 2 m / omega**2 reduces to 1 / curvature, which keeps a_i real
    i = np.arange(i_max - 1)
    a = (V[i + 2] + np.where(i % 2 == 0, 1.0, -1.0) * (3 + i) / 2 * V[1]) / curvature
    a.setflags(write=False)
    alpha0 = (mass * r0**2 * float(V[1])) ** 0.5
    return Orbit(
        energy=E, r0=r0, alpha0=alpha0, V=V, omega=omega, a=a, mass_used=mass
    )
