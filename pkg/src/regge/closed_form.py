"""Explicit fourth-order trajectory for power-law potentials.

Serves as an independent check of the recurrence engine: every term is a
closed-form function of ``v``, ``q = 2n + 1`` and the classical angular
momentum ``alpha0 = sqrt(v m A) * (2E / (A (v + 2)))**((v + 2) / (2v))``.

The hbar**4 term is written with a configurable denominator.  The published
print of this constant (``PRINTED_H4_DENOMINATOR``) disagrees with the
recurrences by exactly a factor of 100; ``H4_DENOMINATOR`` is the value
recovered from the engine by :func:`recover_h4_denominator`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

PRINTED_H4_DENOMINATOR = 2985980.0
H4_DENOMINATOR = 298598400.0  # 12**6 * 100


def classical_alpha0(A: float, v: float, m: float, E: float) -> float:
    base = 2.0 * E / (A * (v + 2.0))
    if not base > 0:
        raise DomainError(f"no classical orbit for A={A}, v={v} at E={E}")
    return math.sqrt(v * m * A) * base ** ((v + 2.0) / (2.0 * v))


def _h4_polynomial(v: float, q: float) -> float:
    return (
        (2415 * v**4 - 70170 * v**3 + 24615 * v**2 + 659820 * v + 659820) * q**4
        + (3270 * v**4 + 59340 * v**3 - 138330 * v**2 - 1028040 * v - 1028040) * q**2
        - 613 * v**4
        + 974 * v**3
        + 46947 * v**2
        + 179996 * v
        + 179996
    )


@dataclass(frozen=True)
class PowerLawTerms:
    """Coefficients of hbar**0 .. hbar**4 for one ``(v, q, alpha0)``."""

    v: float
    q: float
    alpha0: float
    h4_denominator: float = H4_DENOMINATOR

    def term(self, k: int) -> float:
        v, q, a0 = self.v, self.q, self.alpha0
        s = math.sqrt(v + 2.0)
        g = (v - 2.0) * (v + 1.0)
        if k == 0:
            return a0
        if k == 1:
            return -0.5 * (1.0 + q * s)
        if k == 2:
            return g * (3 * q**2 - 1) / (288.0 * a0)
        if k == 3:
            poly = (5 * v**2 - 29 * v - 58) * q**3 - (v**2 - 25 * v - 50) * q
            return -g * poly / (13824.0 * a0**2 * s)
        if k == 4:
            return g * _h4_polynomial(v, q) / (self.h4_denominator * (v + 2.0) * a0**3)
        raise ValueError("closed form is available for k = 0..4 only")

    def terms(self) -> np.ndarray:
        return np.array([self.term(k) for k in range(5)])


def powerlaw_terms(
    A: float, v: float, m: float, E: float, n: int, h4_denominator: float = H4_DENOMINATOR
) -> PowerLawTerms:
    if v <= -2.0 or v == 0.0:
        raise DomainError(f"exponent v={v} outside the supported range")
    return PowerLawTerms(
        v=v, q=2 * n + 1, alpha0=classical_alpha0(A, v, m, E), h4_denominator=h4_denominator
    )


def alpha4_powerlaw(
    A: float,
    v: float,
    m: float,
    E: float,
    n: int,
    hbar: float = 1.0,
    h4_denominator: float = H4_DENOMINATOR,
) -> float:
    """Fourth-order trajectory ``alpha(E)`` for ``V = A r**v``."""
    t = powerlaw_terms(A, v, m, E, n, h4_denominator).terms()
    return float(sum(t[k] * hbar**k for k in range(5)))


def recover_h4_denominator(samples) -> float:
    """Least-squares fit of the hbar**4 denominator against the recurrences.

    ``samples`` is an iterable of ``(A, v, m, E, n)``.  The fitted quantity is
    ``1/D`` in ``alpha_4 = (1/D) * X`` with ``X`` the rest of the closed form.
    """
    from .engine import expand
    from .potential import PowerLaw

    xs, ys = [], []
    for A, v, m, E, n in samples:
        terms = powerlaw_terms(A, v, m, E, n, h4_denominator=1.0)
        x = terms.term(4)
        if x == 0.0:
            continue
        xs.append(x)
        ys.append(float(expand(PowerLaw(A, v), E, m, n, 4).coeffs[4]))
    xs, ys = np.array(xs), np.array(ys)
    inv_d = np.dot(xs, ys) / np.dot(xs, xs)
    return 1.0 / inv_d
