"""Recurrences for the semiclassical hbar-expansion of Regge trajectories.

The logarithmic derivative ``C = hbar u'/u`` of the radial wavefunction
obeys the Riccati equation

    hbar C' + C**2 = 2m (V - E) + alpha (alpha + hbar) / r**2,

with ``alpha = hbar l``.  Expanding ``C = sum_k C_k hbar**k``,
``alpha = sum_k alpha_k hbar**k`` and each ``C_k`` as a Laurent series
``x**(1-2k) sum_i C[k][i] x**i`` around the circular orbit turns the ODE into
purely algebraic recurrences.  The node count ``n`` enters through the
quantization entries ``C[1][0] = n / r0`` and ``C[k][2k-2] = 0`` for k >= 2.

Row ``k`` is filled in two phases: entries ``i <= 2k-2`` do not involve
``alpha_k`` and are computed first, then ``alpha_k`` follows from the
``x**0`` balance, and only then the remaining entries of the row.

The optional ``mass_shift`` sequence ``(m0, m1, m2, ...)`` adds the source
terms produced by writing the mass as ``m0 + m1 hbar + m2 hbar**2 + ...``;
the orbit must then be built with ``m0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DependencyOrder
from .potential import Orbit, PotentialSpec, build_orbit


@dataclass
class CoeffTable:
    """Laurent coefficients ``C[k][i]`` of the logarithmic derivative.

    Rows are plain lists while being filled; :meth:`freeze` turns them into
    tuples.  ``filled_up_to[k]`` is the largest ``i`` computed so far in row
    ``k`` (``-1`` for an empty row).
    """

    n: int
    r0: float
    rows: list
    filled_up_to: list[int]

    @classmethod
    def empty(cls, n: int, r0: float, order: int, width: int):
        return cls(
            n=n,
            r0=r0,
            rows=[[0.0] * (width + 1) for _ in range(order + 1)],
            filled_up_to=[-1] * (order + 1),
        )

    @property
    def order(self) -> int:
        return len(self.rows) - 1

    @property
    def width(self) -> int:
        return len(self.rows[0]) - 1

    @property
    def C(self) -> np.ndarray:
        out = np.array(self.rows)
        out.setflags(write=False)
        return out

    @property
    def frozen(self) -> bool:
        return isinstance(self.rows, tuple)

    def freeze(self) -> None:
        self.rows = tuple(tuple(r) for r in self.rows)


@dataclass(frozen=True)
class Expansion:
    """Coefficients ``alpha_0 .. alpha_N`` of a Regge trajectory at one energy."""

    coeffs: np.ndarray
    energy: float
    n: int
    potential: str
    mass_model: tuple
    table: CoeffTable | None = field(default=None, repr=False, compare=False)
    orbit: Orbit | None = field(default=None, repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, hbar: float = 1.0):
        return evaluate(self, hbar)


def _shift(mass_shift, k):
    if mass_shift is None or k >= len(mass_shift):
        return 0.0
    return mass_shift[k]


def zeroth_order(orbit: Orbit, i_max: int) -> list:
    """Row ``C[0][0..i_max]`` from the classical (hbar**0) balance."""
    omega = orbit.omega
    a = orbit.a
    if i_max > len(a) - 1:
        raise DependencyOrder(
            f"zeroth row to i={i_max} needs a_i up to {i_max}, orbit has {len(a) - 1}"
        )
    a = a.tolist()
    row = [0.0] * (i_max + 1)
    row[0] = -omega
    w2 = omega**2
    for i in range(1, i_max + 1):
        conv = sum(row[j] * row[i - j] for j in range(1, i))
        row[i] = (conv - w2 * a[i]) / (2 * omega)
    return row


def laurent_row(
    k: int,
    table: CoeffTable,
    alphas: Sequence,
    orbit: Orbit,
    i_max: int,
    mass_shift: Sequence | None = None,
) -> list:
    """Extend row ``k >= 1`` of ``table`` up to column ``i_max``.

    Entries already present are kept.  Columns ``i > 2k-2`` need ``alpha_k``;
    requesting them with only ``alpha_0 .. alpha_{k-1}`` raises
    :class:`DependencyOrder`.
    """
    if k < 1:
        raise ValueError("laurent_row handles k >= 1; use zeroth_order for k = 0")
    if i_max > table.width:
        raise DependencyOrder(f"row {k} to i={i_max} exceeds table width {table.width}")
    if table.frozen:
        raise ValueError("table is frozen")
    C = table.rows
    r0 = orbit.r0
    V = orbit.V.tolist()
    q = 2 * k - 2
    m_k = _shift(mass_shift, k)
    for j in range(k):
        if table.filled_up_to[j] < i_max:
            raise DependencyOrder(f"row {k} to i={i_max} needs row {j} to i={i_max}")
    if i_max > q and len(alphas) <= k:
        raise DependencyOrder(f"C[{k}][{i_max}] needs alpha_{k}")

    two_c00 = 2 * C[0][0]
    row, prev, first = C[k], C[k - 1], C[0]
    for i in range(table.filled_up_to[k] + 1, i_max + 1):
        if i == q:
            row[i] = table.n / r0 if k == 1 else 0.0
            table.filled_up_to[k] = i
            continue
        s = -(i - q + 1) / r0 * prev[i]
        for j in range(1, k):
            cj, ckj = C[j], C[k - j]
            s -= sum(cj[p] * ckj[i - p] for p in range(i + 1))
        s -= 2 * sum(first[p] * row[i - p] for p in range(1, i + 1))
        if i >= q:
            cent = alphas[k - 1] + sum(alphas[j] * alphas[k - j] for j in range(k + 1))
            sign = -1.0 if i % 2 else 1.0
            s += sign * (i - q + 1) / r0**2 * cent + 2 * m_k * V[i - q]
        row[i] = s / two_c00
        table.filled_up_to[k] = i
    return row[: i_max + 1]


def alpha_step(
    k: int,
    table: CoeffTable,
    alphas: Sequence,
    orbit: Orbit,
    mass_shift: Sequence | None = None,
):
    """``alpha_k`` from the ``x**0`` balance at order ``hbar**k``."""
    q = 2 * k - 2
    for j in range(k + 1):
        if table.filled_up_to[j] < q:
            raise DependencyOrder(f"alpha_{k} needs row {j} through column {q}")
    if len(alphas) < k:
        raise DependencyOrder(f"alpha_{k} needs alpha_0 .. alpha_{k - 1}")
    C = table.rows
    r0 = orbit.r0
    conv = sum(C[j][p] * C[k - j][q - p] for j in range(k + 1) for p in range(q + 1))
    bracket = (
        r0 * C[k - 1][q]
        + r0**2 * conv
        + _shift(mass_shift, k) * r0**2 * float(orbit.V[1])
        - alphas[k - 1]
        - sum(alphas[j] * alphas[k - j] for j in range(1, k))
    )
    return bracket / (2 * alphas[0])


def expand(
    pot: PotentialSpec,
    E: float,
    mass,
    n: int,
    N: int,
    mass_shift: Sequence | None = None,
    orbit: Orbit | None = None,
) -> Expansion:
    """Trajectory coefficients ``alpha_0 .. alpha_N`` at energy ``E``.

    Parameters
    ----------
    pot : PotentialSpec
    E : float
        Energy at which the trajectory is expanded.
    mass : float or complex
        Mass entering the classical orbit (``m0`` for renormalized runs).
    n : int
        Radial quantum number (node count).
    N : int
        Highest power of hbar kept.
    mass_shift : sequence, optional
        ``(m0, m1, ..., )``; only entries ``k >= 1`` are read here.
    orbit : Orbit, optional
        Prebuilt orbit, must have been built with ``mass``.
    """
    if N < 0 or n < 0:
        raise ValueError("order N and node count n must be non-negative")
    width = 2 * N + 2
    if orbit is None:
        orbit = build_orbit(pot, E, mass, i_max=width + 2)
    dtype = np.result_type(
        orbit.omega, orbit.alpha0, *(np.asarray(m) for m in (mass_shift or ()))
    )
    table = CoeffTable.empty(n, orbit.r0, N, width)
    table.rows[0] = zeroth_order(orbit, width)
    table.filled_up_to[0] = width

    alphas = [orbit.alpha0]
    for k in range(1, N + 1):
        laurent_row(k, table, alphas, orbit, 2 * k - 2, mass_shift)
        alphas.append(alpha_step(k, table, alphas, orbit, mass_shift))
        laurent_row(k, table, alphas, orbit, width, mass_shift)
    table.freeze()

    coeffs = np.array(alphas, dtype=dtype)
    coeffs.setflags(write=False)
    model = tuple(mass_shift) if mass_shift is not None else (mass,)
    return Expansion(
        coeffs=coeffs,
        energy=E,
        n=n,
        potential=pot.label,
        mass_model=model,
        table=table,
        orbit=orbit,
    )


def evaluate(exp: Expansion, hbar: float = 1.0):
    """Plain partial sum ``sum_k alpha_k hbar**k``."""
    total = 0.0
    for c in exp.coeffs[::-1]:
        total = total * hbar + c
    return total
