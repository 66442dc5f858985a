import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from regge.engine import CoeffTable, alpha_step, evaluate, expand, laurent_row, zeroth_order
from regge.errors import DependencyOrder
from regge.potential import Orbit, PowerLaw, build_orbit


def test_zeroth_row_first_entry(harmonic):
    orb = build_orbit(harmonic, 2.0, 1.0)
    row = zeroth_order(orb, 6)
    assert row[0] == -orb.omega
    assert row[1] == pytest.approx(-orb.omega * orb.a[1] / 2, rel=1e-15)


def test_zeroth_row_vanishes_without_source():
    a = np.zeros(11)
    a[0] = 1.0
    orb = Orbit(energy=1.0, r0=1.0, alpha0=1.0, V=np.zeros(13), omega=2.0, a=a, mass_used=1.0)
    row = zeroth_order(orb, 10)
    assert row[0] == -2.0
    assert all(c == 0 for c in row[1:])


@pytest.mark.parametrize("n, l", [(1, 0), (2, 1)])
def test_zeroth_row_matches_symbolic_square_root(martin, martin_energies, n, l):
    # C_0 = -x * omega * sqrt(well / (omega x)^2), expanded directly by sympy
    E = martin_energies[(n, l)]
    orb = build_orbit(martin, E, 1.0)
    row = zeroth_order(orb, 10)
    x = sp.symbols("x")
    r0 = sp.Float(orb.r0, 40)
    well = 2 * ((r0 * (1 + x)) ** sp.Rational(1, 10) - sp.Float(E, 40)) + sp.Float(orb.V[1], 40) / (1 + x) ** 2
    ser = sp.series(well, x, 0, 14).removeO()
    coeffs = [ser.coeff(x, i) for i in range(14)]
    # the orbit condition removes the constant and linear terms
    assert abs(coeffs[0]) < 1e-12 and abs(coeffs[1]) < 1e-12
    shape = sum(coeffs[i] / coeffs[2] * x ** (i - 2) for i in range(2, 14))
    c0 = sp.series(-sp.sqrt(coeffs[2]) * sp.sqrt(shape), x, 0, 11).removeO()
    expected = [float(c0.coeff(x, i)) for i in range(11)]
    np.testing.assert_allclose(row, expected, rtol=1e-9, atol=1e-12)


def test_harmonic_ground_state_table_is_exact(harmonic):
    # u = r^(l+1) exp(-sqrt(2mA) r^2 / 2) gives C = (alpha + hbar)/r - sqrt(2mA) r exactly
    E = 3.7
    exp = expand(harmonic, E, 1.0, 0, 4)
    C, r0, a0 = exp.table.C, exp.orbit.r0, exp.coeffs[0]
    i = np.arange(1, C.shape[1])
    np.testing.assert_allclose(C[0, 1:], a0 / r0 * (-1.0) ** (i + 1), rtol=1e-12)
    assert C[0, 0] == pytest.approx(-2 * math.sqrt(2) * r0, rel=1e-14)
    assert C[1, 0] == 0.0
    np.testing.assert_allclose(C[1, 1:], -((-1.0) ** (i - 1)) / (2 * r0), rtol=1e-12)
    np.testing.assert_allclose(C[2:], 0.0, atol=1e-12)


def test_quantization_entries_bypass_recurrence(martin):
    orb = build_orbit(martin, 1.3, 1.0)
    table = CoeffTable.empty(3, orb.r0, 2, 6)
    table.rows[0] = zeroth_order(orb, 6)
    table.filled_up_to[0] = 6
    row1 = laurent_row(1, table, [orb.alpha0], orb, 0)
    assert row1[0] == 3 / orb.r0
    alphas = [orb.alpha0, alpha_step(1, table, [orb.alpha0], orb)]
    laurent_row(1, table, alphas, orb, 6)
    row2 = laurent_row(2, table, alphas, orb, 2)
    assert row2[2] == 0.0


@pytest.mark.parametrize("v", [-0.5, 0.1, 0.5, 1.0, 3.0])
@pytest.mark.parametrize("n", [0, 1, 4])
def test_first_order_coefficient(v, n):
    A, E = (1.0, 1.4) if v > 0 else (-1.0, -0.6)
    exp = expand(PowerLaw(A, v), E, 1.0, n, 1)
    assert exp.coeffs[1] == pytest.approx(-0.5 * (1 + (2 * n + 1) * math.sqrt(v + 2)), rel=1e-13)


def test_second_order_vanishes_for_harmonic(harmonic):
    assert abs(expand(harmonic, 5.0, 1.0, 2, 2).coeffs[2]) < 1e-14


def test_second_order_martin_row(martin, martin_energies):
    E = martin_energies[(1, 0)]
    v, q = 0.1, 3
    exp = expand(martin, E, 1.0, 1, 2)
    a0 = math.sqrt(v) * (2 * E / 2.1) ** (2.1 / 0.2)
    expected = (v - 2) * (v + 1) * (3 * q * q - 1) / (288 * a0)
    assert exp.coeffs[2] == pytest.approx(expected, rel=1e-12)


def test_harmonic_coefficients(harmonic):
    exp = expand(harmonic, 2.0, 1.0, 0, 4)
    np.testing.assert_allclose(exp.coeffs, [math.sqrt(2), -1.5, 0, 0, 0], atol=1e-14)
    assert evaluate(exp, 1.0) == pytest.approx(math.sqrt(2) - 1.5, abs=1e-14)
    assert evaluate(exp, 0.0) == exp.coeffs[0]


@settings(max_examples=50, deadline=None)
@given(
    E=st.floats(0.5, 50.0),
    n=st.integers(0, 4),
    A=st.floats(0.2, 5.0),
    m=st.floats(0.2, 5.0),
    hbar=st.floats(0.05, 1.5),
)
def test_harmonic_exactness(E, n, A, m, hbar):
    exp = expand(PowerLaw(A, 2.0), E, m, n, 4)
    omega_ho = math.sqrt(2 * A / m)
    assert evaluate(exp, hbar) == pytest.approx(E / omega_ho - hbar * (2 * n + 1.5), rel=1e-10, abs=1e-10)


def test_quantization_invariants_after_expand(martin):
    for n in range(5):
        exp = expand(martin, 1.4, 1.0, n, 4)
        C = exp.table.C
        assert C[1, 0] * exp.orbit.r0 == pytest.approx(n, abs=1e-15)
        for k in range(2, 5):
            assert C[k, 2 * k - 2] == 0.0


def test_order_zero_independent_of_n(martin):
    a0 = {expand(martin, 1.33, 1.0, n, 4).coeffs[0] for n in range(5)}
    assert len(a0) == 1


def test_expansion_is_frozen(martin):
    exp = expand(martin, 1.3, 1.0, 1, 4)
    assert exp.table.frozen
    with pytest.raises(ValueError):
        exp.coeffs[0] = 0.0
    with pytest.raises(ValueError):
        laurent_row(1, exp.table, list(exp.coeffs), exp.orbit, 3)


def test_dependency_order_enforced(martin):
    orb = build_orbit(martin, 1.3, 1.0)
    table = CoeffTable.empty(1, orb.r0, 2, 6)
    with pytest.raises(DependencyOrder):
        laurent_row(1, table, [orb.alpha0], orb, 0)  # row 0 missing
    table.rows[0] = zeroth_order(orb, 6)
    table.filled_up_to[0] = 6
    with pytest.raises(DependencyOrder):
        alpha_step(1, table, [orb.alpha0], orb)  # quantized entry not yet set
    with pytest.raises(DependencyOrder):
        laurent_row(1, table, [orb.alpha0], orb, 3)  # needs alpha_1


def test_order_zero_only(martin):
    exp = expand(martin, 1.3, 1.0, 0, 0)
    assert exp.order == 0
    assert evaluate(exp, 1.0) == exp.coeffs[0]
