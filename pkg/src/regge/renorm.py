"""Mass renormalization of the trajectory series and its two fixing schemes.

The mass is redistributed over powers of hbar, ``m = m0 + m1 hbar + m2 hbar**2``,
with ``m0 = m - m1 hbar - m2 hbar**2`` at the evaluation point so that the
physical mass is unchanged.  The free pair ``(m1, m2)`` is fixed either by
minimal sensitivity (the gradient of the truncated sum vanishes) or by
fastest convergence (the last two coefficients vanish).

Gradients of the truncated sum are taken by complex-step differentiation
through the recurrences, which is exact to rounding and keeps the residual
tolerance meaningful at the 1e-10 level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from .engine import Expansion, evaluate, expand
from .errors import DomainError, NoConvergence, OrbitLost, ReggeError
from .potential import PotentialSpec, build_orbit, find_orbit_radius

log = logging.getLogger(__name__)

_CSTEP = 1e-30


class Scheme(str, Enum):
    MINIMAL_SENSITIVITY = "pms"
    FASTEST_CONVERGENCE = "fc"


@dataclass(frozen=True)
class MassExpansion:
    """Renormalization parameters ``(m0, m1, m2)`` for a physical mass."""

    m: tuple
    physical_mass: float
    hbar_eval: float = 1.0

    def __post_init__(self):
        if not np.real(self.m[0]) > 0:
            raise DomainError(f"m0={self.m[0]} must be positive")
        total = sum(mk * self.hbar_eval**k for k, mk in enumerate(self.m))
        if abs(total - self.physical_mass) > 1e-12 * max(1.0, abs(self.physical_mass)):
            raise DomainError(
                f"m0 + m1 hbar + m2 hbar^2 = {total} differs from mass {self.physical_mass}"
            )

    @classmethod
    def from_shifts(
        cls, mass: float, m1: float = 0.0, m2: float = 0.0, hbar: float = 1.0
    ) -> "MassExpansion":
        return cls(
            m=(mass - m1 * hbar - m2 * hbar**2, m1, m2),
            physical_mass=mass,
            hbar_eval=hbar,
        )


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 100
    fd_step: float = 1e-6
    grid_points: int = 5
    grid_span: float = 0.5
    cond_max: float = 1e12
    multistart: bool = True


@dataclass(frozen=True)
class SchemeResult:
    """Outcome of one parameter-fixing solve.

    ``roots`` lists every distinct root the multi-start search found as
    ``(m1, m2, alpha_tilde)``; the selected one is closest to the origin.
    """

    scheme: Scheme
    m1: float
    m2: float
    alpha_tilde: float
    residuals: tuple
    iterations: int
    coeffs: np.ndarray
    degenerate: bool = False
    roots: tuple = field(default=(), compare=False)


def renorm_expand(
    pot: PotentialSpec, E: float, me: MassExpansion, n: int, N: int, r0: float | None = None
) -> Expansion:
    """Renormalized coefficients ``alpha~_0 .. alpha~_N``."""
    orbit = build_orbit(pot, E, me.m[0], i_max=2 * N + 4, r0=r0)
    return expand(pot, E, me.m[0], n, N, mass_shift=me.m, orbit=orbit)


class _Problem:
    """Residual systems of both schemes for one ``(E, n)`` query."""

    def __init__(self, pot, E, mass, n, N, hbar):
        if not mass > 0:
            raise DomainError(f"mass must be positive, got {mass}")
        self.pot, self.E, self.mass, self.n, self.N, self.hbar = pot, E, mass, n, N, hbar
        self.r0 = find_orbit_radius(pot, E)
        self.evals = 0

    def series(self, m1, m2) -> np.ndarray:
        m0 = self.mass - m1 * self.hbar - m2 * self.hbar**2
        if not np.real(m0) > 0:
            raise OrbitLost(f"m0={m0} is not positive at (m1, m2)=({m1}, {m2})")
        self.evals += 1
        try:
            orbit = build_orbit(self.pot, self.E, m0, i_max=2 * self.N + 4, r0=self.r0)
        except ReggeError as exc:
            raise OrbitLost(str(exc)) from exc
        return expand(
            self.pot, self.E, m0, self.n, self.N, mass_shift=(m0, m1, m2), orbit=orbit
        ).coeffs

    def alpha(self, m1, m2):
        c = self.series(m1, m2)
        return sum(c[k] * self.hbar**k for k in range(len(c)))

    def gradient(self, m1, m2) -> np.ndarray:
        h = _CSTEP
        d1 = np.imag(self.alpha(m1 + 1j * h, m2)) / h
        d2 = np.imag(self.alpha(m1, m2 + 1j * h)) / h
        return np.array([d1, d2])

    def residual(self, scheme: Scheme, x) -> np.ndarray:
        m1, m2 = x
        if scheme is Scheme.FASTEST_CONVERGENCE:
            c = self.series(m1, m2)
            return np.array([np.real(c[-2]), np.real(c[-1])])
        return self.gradient(m1, m2)


def _jacobian(prob: _Problem, scheme: Scheme, x, cfg: SolverConfig) -> np.ndarray:
    J = np.empty((2, 2))
    for i in range(2):
        h = cfg.fd_step * max(prob.mass, abs(x[i]))
        e = np.zeros(2)
        e[i] = h
        J[:, i] = (prob.residual(scheme, x + e) - prob.residual(scheme, x - e)) / (2 * h)
    return J


def _newton(prob: _Problem, scheme: Scheme, x0, cfg: SolverConfig, scale: float):
    """Damped Newton; returns ``(x, F, iterations)`` or ``None`` when stalled."""
    x = np.asarray(x0, dtype=float)
    try:
        F = prob.residual(scheme, x)
    except OrbitLost:
        return None
    for it in range(1, cfg.max_iter + 1):
        if np.max(np.abs(F)) <= cfg.tol * scale:
            return x, F, it - 1
        try:
            J = _jacobian(prob, scheme, x, cfg)
            dx = np.linalg.solve(J, -F)
        except (OrbitLost, np.linalg.LinAlgError):
            return None
        lam = 1.0
        norm = np.linalg.norm(F)
        while lam > 1e-6:
            trial = x + lam * dx
            try:
                Ft = prob.residual(scheme, trial)
                if np.all(np.isfinite(Ft)) and np.linalg.norm(Ft) < norm:
                    break
            except OrbitLost:
                pass
            lam *= 0.5
        else:
            return None
        x, F = trial, Ft
    if np.max(np.abs(F)) <= cfg.tol * scale:
        return x, F, cfg.max_iter
    return None


def _simplex_then_newton(prob, scheme, x0, cfg, scale):
    def objective(x):
        try:
            F = prob.residual(scheme, x)
        except OrbitLost:
            return np.inf
        return float(np.dot(F, F))

    res = minimize(
        objective, x0, method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-30, "maxiter": 4000},
    )
    return _newton(prob, scheme, res.x, cfg, scale)


def _solve(pot, E, mass, n, N, scheme, cfg, hbar) -> SchemeResult:
    cfg = cfg or SolverConfig()
    prob = _Problem(pot, E, mass, n, N, hbar)
    base = prob.series(0.0, 0.0)
    scale = abs(base[0])

    if np.all(np.abs(base[2:]) <= 1e-12 * scale):
        # series already terminates: no parameter direction carries information
        return SchemeResult(
            scheme=scheme, m1=0.0, m2=0.0, alpha_tilde=float(prob.alpha(0.0, 0.0)),
            residuals=(0.0, 0.0), iterations=0, coeffs=base, degenerate=True,
        )

    starts = [np.zeros(2)]
    if cfg.multistart:
        g = np.linspace(-cfg.grid_span * mass, cfg.grid_span * mass, cfg.grid_points)
        starts += [np.array([a, b]) for a in g for b in g if a or b]

    found: list[tuple[np.ndarray, np.ndarray, int]] = []
    total_iter = 0
    for start in starts:
        out = _newton(prob, scheme, start, cfg, scale)
        if out is None and start is starts[0]:
            out = _simplex_then_newton(prob, scheme, start, cfg, scale)
        if out is None:
            continue
        x, F, it = out
        total_iter += it
        if not any(np.allclose(x, y, atol=1e-7 * mass) for y, _, _ in found):
            found.append((x, F, it))
    if not found:
        raise NoConvergence(f"{scheme.value}: no root found at E={E}, n={n}")

    x, F, _ = min(found, key=lambda r: np.hypot(*(r[0] / mass)))
    # re-evaluate from scratch at the chosen root
    F = prob.residual(scheme, x)
    coeffs = prob.series(*x)
    try:
        cond = np.linalg.cond(_jacobian(prob, scheme, x, cfg))
    except OrbitLost:
        cond = np.inf
    roots = tuple((float(y[0]), float(y[1]), float(prob.alpha(*y))) for y, _, _ in found)
    if len(found) > 1:
        log.debug("%s at E=%g n=%d: %d roots %s", scheme.value, E, n, len(found), roots)
    return SchemeResult(
        scheme=scheme,
        m1=float(x[0]),
        m2=float(x[1]),
        alpha_tilde=float(np.real(evaluate_coeffs(coeffs, hbar))),
        residuals=tuple(float(f) for f in F),
        iterations=total_iter,
        coeffs=coeffs,
        degenerate=bool(cond > cfg.cond_max),
        roots=roots,
    )


def evaluate_coeffs(coeffs, hbar: float = 1.0):
    return sum(c * hbar**k for k, c in enumerate(coeffs))


def solve_scheme1(
    pot: PotentialSpec, E: float, m: float, n: int, N: int = 4,
    solver_cfg: SolverConfig | None = None, hbar: float = 1.0,
) -> SchemeResult:
    """Minimal sensitivity: both partial derivatives of the sum vanish."""
    return _solve(pot, E, m, n, N, Scheme.MINIMAL_SENSITIVITY, solver_cfg, hbar)


def solve_scheme2(
    pot: PotentialSpec, E: float, m: float, n: int, N: int = 4,
    solver_cfg: SolverConfig | None = None, hbar: float = 1.0,
) -> SchemeResult:
    """Fastest convergence: the two highest coefficients vanish."""
    return _solve(pot, E, m, n, N, Scheme.FASTEST_CONVERGENCE, solver_cfg, hbar)


def alpha_tilde(
    pot: PotentialSpec, E: float, m: float, n: int, m1: float, m2: float,
    N: int = 4, hbar: float = 1.0,
) -> float:
    """Renormalized truncated sum at ``(m1, m2)`` with the physical-mass constraint."""
    me = MassExpansion.from_shifts(m, m1, m2, hbar)
    return float(evaluate(renorm_expand(pot, E, me, n, N), hbar))


def sensitivity(
    pot: PotentialSpec, E: float, m: float, n: int, m1: float, m2: float,
    N: int = 4, hbar: float = 1.0,
) -> np.ndarray:
    """Gradient of :func:`alpha_tilde` in ``(m1, m2)`` as used by scheme 1."""
    return _Problem(pot, E, m, n, N, hbar).gradient(m1, m2)
