import numpy as np
import pytest
from hypothesis import given, strategies as st

from awq.askey_wilson import (
    CANONICAL,
    AWParams,
    aw_poly,
    chebyshev_t_params,
    default_grid,
    eigenvalue_lambda,
    norm_xi,
)
from awq.chebpoly import ChebSeries, dq_pointwise, gamma_factor, sin_breve, x_to_z
from awq.errors import DomainError, ParameterRoleError
from awq.quadrature import QuadratureRule
from awq.sturm_liouville import (
    SLConfig,
    ansatz_check,
    ansatz_solve,
    apply_T,
    chebyshev_case_check,
    closed_ansatz_coeff,
    dichotomy_check,
    dirichlet_energy,
    dirichlet_positivity,
    eigenvalue_exact,
    lambda_scan,
    parseval_q_check,
    q_inner,
    q_inner_form_check,
    q_orthonormal_basis,
    q_orthonormality_check,
    rayleigh_quotient,
    sample_polys,
    sl_eigen_residual,
    symmetry_residual,
)

CFG = SLConfig(CANONICAL)
RULE = QuadratureRule(128)
coeffs = st.lists(st.floats(-2, 2), min_size=1, max_size=9)


def test_config_weights_positive():
    x = default_grid(64)
    assert np.all(CFG.w(x) > 0) and np.all(CFG.p_inner(x) > 0)
    with pytest.raises(DomainError):
        SLConfig(AWParams(0.5, 1.5, 0.1, 0.1, 0.1))


def test_constants_are_annihilated():
    assert np.max(np.abs(apply_T(ChebSeries.constant(2.5), CFG))) == 0.0


@given(f=coeffs, g=coeffs, alpha=st.floats(-3, 3), beta=st.floats(-3, 3))
def test_operator_is_linear(f, g, alpha, beta):
    f, g = ChebSeries(f), ChebSeries(g)
    lhs = apply_T(f * alpha + g * beta, CFG)
    rhs = alpha * apply_T(f, CFG) + beta * apply_T(g, CFG)
    scale = 1 + np.max(np.abs(lhs))
    assert np.max(np.abs(lhs - rhs)) < 1e-11 * scale


@pytest.mark.parametrize("n", range(0, 9))
def test_eigen_equation(n):
    r = sl_eigen_residual(n, CFG)
    assert r.passed
    if n == 0:
        assert r.residual == 0.0


def test_eigenvalues_negative_and_decreasing():
    lam = [eigenvalue_lambda(n, CANONICAL) for n in range(10)]
    assert lam[0] == 0 and all(b < a for a, b in zip(lam, lam[1:]))


def test_chebyshev_parameters_reduce_to_gamma_squared():
    # T_n parameters: w = 1/sqrt(1-x^2), p_inner = 4 sqrt(1-x^2), lambda_n = -4 gamma_n^2
    for q in (0.3, 0.5, 0.8):
        p = chebyshev_t_params(q)
        for n in range(1, 8):
            assert eigenvalue_lambda(n, p) == pytest.approx(-4 * gamma_factor(n, q) ** 2, rel=1e-13)
        assert sl_eigen_residual(5, SLConfig(p)).passed


@pytest.mark.parametrize("n", range(0, 9))
def test_rayleigh_quotients(n):
    assert rayleigh_quotient(n, CFG, RULE).passed


def test_ansatz_ground_state():
    sol = ansatz_solve(0.0, CANONICAL, 10)
    assert sol.coeffs[1] == 0.0 and sol.terminated_at == 0
    assert sol.as_series(0).coeffs.tolist() == [1.0]


@pytest.mark.parametrize("n", range(0, 9))
def test_ansatz_reproduces_polynomial(n):
    r = ansatz_check(n, CANONICAL)
    assert r.passed
    sol = ansatz_solve(eigenvalue_lambda(n, CANONICAL), CANONICAL, 20)
    assert abs(sol.coeffs[n + 1]) < 1e-10 and sol.terminated_at == n


def test_ansatz_closed_coefficients():
    for n in range(6):
        sol = ansatz_solve(eigenvalue_lambda(n, CANONICAL), CANONICAL, 10)
        closed = [closed_ansatz_coeff(k, n, CANONICAL) for k in range(n + 1)]
        assert sol.coeffs[: n + 1] == pytest.approx(closed, rel=1e-13)


def test_exact_ansatz_terminates_exactly():
    sol = ansatz_solve(eigenvalue_exact(5, CANONICAL), CANONICAL, 8, exact=True)
    assert sol.exact[6] == 0 and sol.terminated_at == 5


def test_non_eigenvalue_does_not_terminate():
    lam = (eigenvalue_lambda(1, CANONICAL) + eigenvalue_lambda(2, CANONICAL)) / 2
    sol = ansatz_solve(lam, CANONICAL, 20)
    assert sol.terminated_at is None
    assert np.all(np.abs(sol.coeffs) > 1e-10)


def test_ansatz_role_errors():
    with pytest.raises(ParameterRoleError):
        ansatz_solve(0.0, AWParams(0.5, 0.0, 0.1, 0.2, 0.3))
    # ab = 1/q makes the k = 1 denominator vanish
    with pytest.raises(ParameterRoleError):
        ansatz_solve(1.0, AWParams(0.5, 1.0, 2.0, 0.1, 0.1), 3)


def test_dichotomy_scan():
    scan = lambda_scan(CANONICAL)
    assert len(scan) == 50 and sum(n is not None for _, n, _ in scan) == 7
    assert dichotomy_check(CANONICAL).passed


@pytest.mark.parametrize("q", [0.3, 0.8])
def test_dichotomy_other_bases(q):
    assert dichotomy_check(AWParams(q, *CANONICAL.params)).passed


def test_positivity_and_energy_identity(rng):
    for f in sample_polys(rng, 20, 8):
        r = dirichlet_positivity(f, CFG, RULE)
        assert r.passed and r.meta["T_form"] >= -1e-10
    assert dirichlet_positivity(ChebSeries.constant(1.0), CFG, RULE).meta["energy"] == 0.0


def test_energy_of_eigenfunction():
    for n in range(1, 7):
        pn = aw_poly(n, CANONICAL)
        target = -eigenvalue_lambda(n, CANONICAL) * norm_xi(n, CANONICAL)
        assert dirichlet_energy(pn, pn, CFG, RULE) == pytest.approx(target, rel=1e-8)


def test_symmetry(rng):
    fs = sample_polys(rng, 21, 8)
    for f, g in zip(fs, fs[1:]):
        assert symmetry_residual(f, g, CFG, RULE).passed


def test_q_inner_product():
    assert q_inner(ChebSeries.constant(1.0), ChebSeries.constant(1.0), CFG, RULE) == pytest.approx(
        norm_xi(0, CANONICAL), rel=1e-12)
    for m in range(7):
        for n in range(7):
            got = q_inner(aw_poly(m, CANONICAL), aw_poly(n, CANONICAL), CFG, RULE)
            want = (1 - eigenvalue_lambda(n, CANONICAL)) * norm_xi(n, CANONICAL) if m == n else 0.0
            assert abs(got - want) <= 1e-8 * max(1.0, abs(want))


def test_q_form_and_orthonormality(rng):
    f, g = sample_polys(rng, 2, 8)
    assert q_inner_form_check(f, g, CFG, RULE).passed
    assert q_orthonormality_check(CFG, 6, RULE).passed


def test_parseval():
    e = q_orthonormal_basis(CFG, 6)
    r = parseval_q_check(e[3], CFG, 6, RULE)
    assert r.meta["sum"] == pytest.approx(1.0, rel=1e-10)
    assert r.meta["norm_Q"] == pytest.approx(1.0, rel=1e-10)
    f = ChebSeries(np.random.default_rng(3).standard_normal(7))
    assert parseval_q_check(f, CFG, 6, RULE).passed
    with pytest.raises(DomainError):
        parseval_q_check(f, CFG, 5, RULE)


def test_truncated_parseval_sums_increase():
    f = ChebSeries(np.random.default_rng(3).standard_normal(7))
    e = q_orthonormal_basis(CFG, 6)
    partial = np.cumsum([q_inner(f, en, CFG, RULE) ** 2 for en in e])
    assert np.all(np.diff(partial) > 0)
    assert partial[-1] == pytest.approx(q_inner(f, f, CFG, RULE), rel=1e-8)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
def test_chebyshev_closing_identity(q):
    for n in range(11):
        assert chebyshev_case_check(n, q, default_grid(64)).passed


def test_chebyshev_case_first_degree():
    # D_q T_1 = 1, so sqrt(1-x^2) D_q sqrt(1-x^2) = -x
    x = default_grid(16)
    z = x_to_z(x)
    got = (sin_breve(z) * dq_pointwise(sin_breve, z, 0.4)).real
    assert np.allclose(got, -x, atol=1e-14)
