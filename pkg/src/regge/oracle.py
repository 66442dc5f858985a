"""Independent bound-state solver for the radial Schroedinger equation.

Solves

    -hbar**2/(2m) u'' + [hbar**2 l(l+1)/(2m r**2) + V(r)] u = E u,
    u(0) = u(inf) = 0,

for real ``l > -1/2`` by Numerov shooting on a logarithmic grid.  With
``r = exp(t)`` and ``u = exp(t/2) w`` the equation becomes

    w'' = [(l + 1/2)**2 + r**2 2m (V - E) / hbar**2] w,

which has no first-derivative term, handles non-integer ``l`` exactly and
resolves both the ``r**(l+1)`` behaviour near the origin and the long tails
of soft potentials with one uniform step.  The outer wall is placed where
the WKB decay exponent past the last turning point reaches ``decay``.

Eigenvalues are bracketed by Sturm node counting and polished with Brent's
method on the value of the outward solution at the wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, GridTooSmall, NoConvergence, OutOfRange
from .potential import PotentialSpec


@dataclass(frozen=True)
class OracleConfig:
    points: int = 40000
    r_min: float = 1e-6
    decay: float = 40.0
    richardson_tol: float = 1e-8
    max_refine: int = 2
    scan_decades: float = 14.0
    rel_tol: float = 1e-14


@dataclass(frozen=True)
class EigenResult:
    E: float
    n: int
    l: float
    grid: tuple
    converged: bool
    residual: float
    nodes: int


@numba.njit(cache=True)
def _numerov_end(q, h, w0, w1):
    """Integrate ``w'' = q w`` outward; return ``(w_end, nodes)``.

    The solution is rescaled when large so only its sign and relative size
    at the wall are meaningful.
    """
    c = h * h / 12.0
    a = w0
    b = w1
    nodes = 0
    for i in range(1, q.size - 1):
        w = ((2.0 + 10.0 * c * q[i]) * b - (1.0 - c * q[i - 1]) * a) / (1.0 - c * q[i + 1])
        if (w < 0.0) != (b < 0.0) and b != 0.0:
            nodes += 1
        a = b
        b = w
        if abs(b) > 1e200:
            a *= 1e-200
            b *= 1e-200
    return b, nodes


@numba.njit(cache=True)
def _numerov_path(q, h, w0, w1):
    c = h * h / 12.0
    w = np.empty(q.size)
    w[0] = w0
    w[1] = w1
    for i in range(1, q.size - 1):
        w[i + 1] = (
            (2.0 + 10.0 * c * q[i]) * w[i] - (1.0 - c * q[i - 1]) * w[i - 1]
        ) / (1.0 - c * q[i + 1])
        if abs(w[i + 1]) > 1e200:
            w[: i + 2] *= 1e-200
    return w


class _Radial:
    """Fixed physical setup: potential, mass and hbar."""

    def __init__(self, pot: PotentialSpec, m: float, hbar: float, cfg: OracleConfig):
        if not (m > 0 and hbar > 0):
            raise DomainError("mass and hbar must be positive")
        self.pot, self.m, self.hbar, self.cfg = pot, m, hbar, cfg
        self.k = 2.0 * m / hbar**2

    def _scan(self, l: float, E: float, decades: float):
        r = np.geomspace(self.cfg.r_min, self.cfg.r_min * 10**decades, 30000)
        kap2 = self.k * (self.pot.value(r) - E) + (l + 0.5) ** 2 / r**2
        return r, kap2

    def r_max(self, l: float, E: float) -> float:
        for decades in (self.cfg.scan_decades, 2 * self.cfg.scan_decades):
            r, kap2 = self._scan(l, E, decades)
            allowed = np.nonzero(kap2 < 0)[0]
            start = allowed[-1] if allowed.size else 0
            kap = np.sqrt(np.clip(kap2[start:], 0.0, None))
            acc = np.concatenate(([0.0], np.cumsum(0.5 * (kap[1:] + kap[:-1]) * np.diff(r[start:]))))
            j = np.searchsorted(acc, self.cfg.decay)
            if j < acc.size:
                return float(r[start + j])
        raise GridTooSmall(
            f"wavefunction at E={E}, l={l} does not decay within the scanned range"
        )

    def grid(self, l: float, E: float, points: int) -> np.ndarray:
        return np.linspace(math.log(self.cfg.r_min), math.log(self.r_max(l, E)), points)

    def q(self, l: float, E: float, t: np.ndarray) -> np.ndarray:
        r = np.exp(t)
        return (l + 0.5) ** 2 + r * r * self.k * (self.pot.value(r) - E)

    def shoot(self, l: float, E: float, t: np.ndarray):
        s = l + 0.5
        return _numerov_end(self.q(l, E, t), t[1] - t[0], math.exp(s * t[0]), math.exp(s * t[1]))

    def nodes(self, l: float, E: float, points: int) -> int:
        return self.shoot(l, E, self.grid(l, E, points))[1]

    def lowest_energy(self, l: float) -> float:
        r, kap2 = self._scan(l, 0.0, self.cfg.scan_decades)
        return float(np.min(self.pot.value(r) + (l + 0.5) ** 2 / (self.k * r**2)))


def _eigen_on_grid(rad: _Radial, l: float, n: int, points: int):
    e_lo = rad.lowest_energy(l)
    step = max(1.0, abs(e_lo))
    e_hi = e_lo + step
    for _ in range(200):
        if rad.nodes(l, e_hi, points) > n:
            break
        e_lo, e_hi = e_hi, e_hi + step
        step *= 2.0
    else:
        raise NoConvergence(f"could not bracket state n={n}, l={l}")
    while e_hi - e_lo > 1e-7 * max(1.0, abs(e_hi)):
        mid = 0.5 * (e_lo + e_hi)
        if rad.nodes(l, mid, points) > n:
            e_hi = mid
        else:
            e_lo = mid
    t = rad.grid(l, e_hi, points)
    f_lo, nodes_lo = rad.shoot(l, e_lo, t)
    f_hi, nodes_hi = rad.shoot(l, e_hi, t)
    if not (nodes_lo == n and nodes_hi == n + 1 and f_lo * f_hi < 0):
        raise NoConvergence(f"node bracket for n={n}, l={l} is inconsistent")
    E = brentq(
        lambda e: rad.shoot(l, e, t)[0], e_lo, e_hi,
        xtol=1e-15, rtol=rad.cfg.rel_tol, maxiter=200,
    )
    return E, t


def _count_nodes(rad: _Radial, l: float, E: float, t: np.ndarray):
    """Node count and log-derivative matching defect of the eigenfunction.

    The outward solution is trusted up to the last turning point, the
    inward one (started from the wall) beyond it; the true eigenfunction
    has no nodes in the forbidden tail.
    """
    s = l + 0.5
    h = t[1] - t[0]
    q = rad.q(l, E, t)
    turn = int(np.nonzero(q < 0)[0][-1])
    w_out = _numerov_path(q[: turn + 2], h, math.exp(s * t[0]), math.exp(s * t[1]))
    w_in = _numerov_path(q[turn - 1 :][::-1], h, 0.0, 1e-30)[::-1]
    nodes = int(np.count_nonzero(np.sign(w_out[1:turn + 1]) * np.sign(w_out[:turn]) < 0))
    d_out = (w_out[turn + 1] - w_out[turn - 1]) / (2 * h * w_out[turn])
    d_in = (w_in[2] - w_in[0]) / (2 * h * w_in[1])
    return nodes, abs(d_out - d_in) / (abs(d_out) + abs(d_in))


def solve_eigenvalue(
    pot: PotentialSpec,
    m: float,
    hbar: float,
    l: float,
    n: int,
    cfg: OracleConfig | None = None,
) -> EigenResult:
    """Bound-state energy with ``n`` nodes at real angular momentum ``l``.

    The grid is doubled until two successive energies agree to
    ``cfg.richardson_tol`` (relative), at most ``cfg.max_refine`` times.
    """
    cfg = cfg or OracleConfig()
    if l <= -0.5 or n < 0:
        raise DomainError(f"need l > -1/2 and n >= 0, got l={l}, n={n}")
    rad = _Radial(pot, m, hbar, cfg)
    points = cfg.points
    E, t = _eigen_on_grid(rad, l, n, points)
    converged = False
    for _ in range(cfg.max_refine):
        points = 2 * points - 1
        E2, t2 = _eigen_on_grid(rad, l, n, points)
        delta = abs(E2 - E)
        E, t = E2, t2
        if delta <= cfg.richardson_tol * abs(E):
            converged = True
            break
    nodes, tail = _count_nodes(rad, l, E, t)
    return EigenResult(
        E=E, n=n, l=l,
        grid=(float(np.exp(t[0])), float(np.exp(t[-1])), t.size),
        converged=converged, residual=tail, nodes=nodes,
    )


def exact_regge(
    pot: PotentialSpec,
    m: float,
    hbar: float,
    E: float,
    n: int,
    cfg: OracleConfig | None = None,
    l_max: float = 200.0,
    tol: float = 1e-10,
) -> float:
    """Angular momentum ``l`` for which the ``n``-node level sits at ``E``.

    ``E_n(l)`` increases with ``l``, so the inversion is a bracketed root
    search on ``l`` in ``(-1/2, l_max]``.
    """
    cfg = cfg or OracleConfig()

    def mismatch(l):
        return solve_eigenvalue(pot, m, hbar, l, n, cfg).E - E

    lo = -0.5 + 1e-9
    if mismatch(lo) > 0:
        raise OutOfRange(f"E={E} lies below the n={n} level at l=-1/2")
    hi = 1.0
    while mismatch(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > l_max:
            raise OutOfRange(f"E={E} needs l > {l_max} for n={n}")
    return brentq(mismatch, lo, hi, xtol=tol, rtol=1e-13)
