import numpy as np
import pytest
import sympy as sp

from regge.engine import expand
from regge.errors import DomainError, NoConvergence
from regge.potential import PowerLaw
from regge.renorm import (
    MassExpansion,
    Scheme,
    SolverConfig,
    alpha_tilde,
    renorm_expand,
    sensitivity,
    solve_scheme1,
    solve_scheme2,
)

E_MARTIN = 1.3470535020848  # (n, l) = (2, 0) level of the Martin potential at m = hbar = 1


def test_zero_shifts_reduce_to_plain_series(martin):
    me = MassExpansion.from_shifts(1.0, 0.0, 0.0)
    np.testing.assert_array_equal(
        renorm_expand(martin, 1.35, me, 2, 4).coeffs, expand(martin, 1.35, 1.0, 2, 4).coeffs
    )


@pytest.mark.parametrize("m1, m2", [(0.1, -0.05), (-0.3, 0.2), (0.25, 0.25)])
def test_matches_reexpansion_of_mass_scaling(martin, m1, m2):
    # alpha_k scales as m^((1-k)/2); substituting m = m0 + m1 h + m2 h^2 and
    # re-expanding in h must reproduce the renormalized coefficients
    E, n, N = 1.35, 2, 4
    g = expand(martin, E, 1.0, n, N).coeffs
    m0 = 1.0 - m1 - m2
    h = sp.symbols("h")
    M = sp.Float(m0, 30) + sp.Float(m1, 30) * h + sp.Float(m2, 30) * h**2
    total = sum(sp.Float(float(g[k]), 30) * h**k * M ** sp.Rational(1 - k, 2) for k in range(N + 1))
    ser = sp.series(total, h, 0, N + 1).removeO()
    expected = [float(ser.coeff(h, k)) for k in range(N + 1)]
    got = renorm_expand(martin, E, MassExpansion.from_shifts(1.0, m1, m2), n, N).coeffs
    np.testing.assert_allclose(got, expected, rtol=1e-10, atol=1e-14)


def test_mass_expansion_validation():
    with pytest.raises(DomainError):
        MassExpansion.from_shifts(1.0, 0.7, 0.4)  # m0 < 0
    with pytest.raises(DomainError):
        MassExpansion(m=(0.5, 0.1, 0.1), physical_mass=1.0)
    me = MassExpansion.from_shifts(2.0, 0.3, -0.1, hbar=0.5)
    assert me.m[0] + 0.5 * me.m[1] + 0.25 * me.m[2] == pytest.approx(2.0, abs=1e-15)


@pytest.fixture(scope="module")
def fc_root(martin):
    return solve_scheme2(martin, E_MARTIN, 1.0, 2)


@pytest.fixture(scope="module")
def pms_root(martin):
    return solve_scheme1(martin, E_MARTIN, 1.0, 2)


def test_fc_root_kills_last_coefficients(martin, fc_root):
    me = MassExpansion.from_shifts(1.0, fc_root.m1, fc_root.m2)
    c = renorm_expand(martin, E_MARTIN, me, 2, 4).coeffs
    assert max(abs(c[3]), abs(c[4])) <= 1e-10 * abs(c[0])
    assert fc_root.scheme is Scheme.FASTEST_CONVERGENCE
    assert not fc_root.degenerate
    assert alpha_tilde(martin, E_MARTIN, 1.0, 2, fc_root.m1, fc_root.m2) == pytest.approx(
        fc_root.alpha_tilde, abs=1e-13
    )


def test_pms_root_is_stationary(martin, pms_root):
    g = sensitivity(martin, E_MARTIN, 1.0, 2, pms_root.m1, pms_root.m2)
    assert np.max(np.abs(g)) <= 1e-10 * abs(pms_root.coeffs[0])
    assert pms_root.scheme is Scheme.MINIMAL_SENSITIVITY
    assert any(np.isclose(r[2], pms_root.alpha_tilde, atol=1e-12) for r in pms_root.roots)


def test_renormalization_improves_on_plain_series(martin, pms_root, fc_root):
    plain = expand(martin, E_MARTIN, 1.0, 2, 4).evaluate(1.0)
    assert abs(pms_root.alpha_tilde) < abs(plain)
    assert abs(fc_root.alpha_tilde) < abs(plain)


@pytest.mark.parametrize("m1, m2", [(0.0, 0.0), (0.2, -0.1), (-0.4, 0.3)])
def test_complex_step_agrees_with_central_differences(martin, m1, m2):
    g = sensitivity(martin, 1.35, 1.0, 1, m1, m2)
    h = 1e-5
    fd = np.array([
        (alpha_tilde(martin, 1.35, 1.0, 1, m1 + h, m2) - alpha_tilde(martin, 1.35, 1.0, 1, m1 - h, m2)) / (2 * h),
        (alpha_tilde(martin, 1.35, 1.0, 1, m1, m2 + h) - alpha_tilde(martin, 1.35, 1.0, 1, m1, m2 - h)) / (2 * h),
    ])
    np.testing.assert_allclose(g, fd, rtol=1e-6)


@pytest.mark.parametrize("solve", [solve_scheme1, solve_scheme2])
def test_harmonic_is_degenerate(harmonic, solve):
    res = solve(harmonic, 3.0, 1.0, 1)
    assert res.degenerate
    assert res.alpha_tilde == pytest.approx(3 / np.sqrt(2) - 3.5, abs=1e-13)


def test_wide_multistart_survives_lost_orbits(martin):
    cfg = SolverConfig(grid_span=1.0)  # corner starts have m0 <= 0
    res = solve_scheme2(martin, E_MARTIN, 1.0, 2, solver_cfg=cfg)
    assert 1.0 - res.m1 - res.m2 > 0
    assert max(abs(r) for r in res.residuals) <= 1e-10 * abs(res.coeffs[0])


def test_no_convergence_reported(martin):
    cfg = SolverConfig(tol=1e-30, max_iter=3, multistart=False)  # unreachable
    with pytest.raises(NoConvergence):
        solve_scheme1(martin, E_MARTIN, 1.0, 2, solver_cfg=cfg)


def test_nonpositive_mass_rejected(martin):
    with pytest.raises(DomainError):
        solve_scheme2(martin, 1.35, 0.0, 1)
