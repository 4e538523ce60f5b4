import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import chebyshev as npcheb

from awq.chebpoly import (
    DEGREE_CAP,
    ChebSeries,
    cheb_mul_list,
    dq_exact,
    dq_iterated,
    dq_pointwise,
    eval_breve,
    gamma_factor,
    sin_breve,
    theta_to_z,
    u_to_t,
    x_to_z,
)
from awq.errors import DomainError, SingularityError

coeff_lists = st.lists(st.floats(-3, 3), min_size=1, max_size=12)
bases = st.floats(0.1, 0.9)


def test_series_is_immutable():
    f = ChebSeries([1.0, 2.0])
    with pytest.raises(ValueError):
        f.coeffs[0] = 5.0


def test_degree_and_trim():
    assert ChebSeries([1.0, 2.0, 0.0]).degree == 1
    assert ChebSeries([0.0]).degree == -math.inf
    assert ChebSeries([1.0, 0.0, 0.0]).trim().coeffs.size == 1


@given(f=coeff_lists, g=coeff_lists)
def test_product_matches_numpy_and_pointwise(f, g):
    x = np.linspace(-1, 1, 7)
    prod = ChebSeries(f) * ChebSeries(g)
    assert np.allclose(prod(x), npcheb.chebval(x, f) * npcheb.chebval(x, g), atol=1e-9)
    exact = cheb_mul_list(f, g)
    assert np.allclose(exact, prod.padded(len(exact)), atol=1e-12)


def test_linear_arithmetic():
    f, g = ChebSeries([1, 2, 3]), ChebSeries([0.5])
    x = np.array([-0.3, 0.2])
    assert np.allclose((f + g)(x), f(x) + 0.5)
    assert np.allclose((2 - f)(x), 2 - f(x))
    assert np.allclose((f / 4)(x), f(x) / 4)
    assert np.allclose((-f)(x), -f(x))


@given(c=coeff_lists, theta=st.floats(0.01, 3.1))
def test_breve_on_unit_circle_is_real_value(c, theta):
    f = ChebSeries(c)
    assert eval_breve(f, theta_to_z(theta)) == pytest.approx(f(math.cos(theta)), abs=1e-10)


@pytest.mark.parametrize("x", [1.3, -1.7, 2.5])
def test_real_evaluation_outside_interval(x):
    # x = (z + 1/z) / 2 with real z > 1 (or < -1)
    f = ChebSeries([0.3, -1.0, 0.5, 2.0])
    z = x + math.copysign(math.sqrt(x * x - 1), x)
    assert f(x) == pytest.approx(eval_breve(f, z).real, rel=1e-13)
    assert f(x) == pytest.approx(npcheb.chebval(x, f.coeffs), rel=1e-13)


def test_breve_rejects_zero():
    with pytest.raises(DomainError):
        eval_breve(ChebSeries([1.0]), 0.0)


def test_u_in_t_basis():
    x = np.linspace(-0.9, 0.9, 5)
    for m in range(6):
        u = np.sin((m + 1) * np.arccos(x)) / np.sin(np.arccos(x))
        assert np.allclose(npcheb.chebval(x, u_to_t(m)), u)


def test_dq_of_chebyshev_t():
    q = 0.4
    for n in range(1, 8):
        got = dq_exact(ChebSeries.basis(n), q)
        assert np.allclose(got.coeffs, gamma_factor(n, q) * u_to_t(n - 1), atol=1e-13)


def test_dq_of_x_squared():
    # D_q x^2 = (q^{1/2} + q^{-1/2}) x
    q = 0.3
    x2 = ChebSeries([0.5, 0.0, 0.5])
    assert np.allclose(dq_exact(x2, q).coeffs, [0.0, math.sqrt(q) + 1 / math.sqrt(q)])


def test_constants_are_annihilated():
    assert dq_exact(ChebSeries.constant(3.0), 0.5).coeffs.tolist() == [0.0]


@given(c=coeff_lists, q=bases)
def test_exact_and_pointwise_agree(c, q):
    f = ChebSeries(c)
    x = np.linspace(-0.95, 0.95, 9)
    z = x_to_z(x)
    scale = 1 + np.max(np.abs(c)) * gamma_factor(len(c), q) ** 2
    assert np.allclose(dq_pointwise(f, z, q).real, dq_exact(f, q)(x), atol=1e-11 * scale)


def test_tends_to_derivative_as_q_to_one():
    f = ChebSeries([0.2, 1.0, -0.4, 0.3])
    x = np.linspace(-0.8, 0.8, 5)
    err = [np.max(np.abs(dq_exact(f, q)(x) - npcheb.chebval(x, npcheb.chebder(f.coeffs))))
           for q in (0.9, 0.99, 0.999)]
    assert err[0] > err[1] > err[2] and err[2] < 1e-4


@given(c=coeff_lists, q=bases, order=st.integers(0, 4))
def test_iterated_matches_repeated_exact(c, q, order):
    f = ChebSeries(c)
    x = np.linspace(-0.9, 0.9, 5)
    ref = f
    for _ in range(order):
        ref = dq_exact(ref, q)
    got = dq_iterated(f, x_to_z(x), q, order).real
    scale = 1 + np.max(np.abs(c)) * max(1.0, gamma_factor(len(c), q)) ** (2 * order)
    assert np.allclose(got, ref(x), atol=1e-9 * scale)


def test_singularity_reported():
    f = ChebSeries([0.0, 1.0])
    with pytest.raises(SingularityError) as err:
        dq_pointwise(f, np.array([1.0 + 0j]), 0.5)
    assert err.value.point == 1.0
    # z q^{1/2} hits 1 on the second level of the lattice
    with pytest.raises(SingularityError, match="lattice index"):
        dq_iterated(f, 1 / math.sqrt(0.5), 0.5, 2)


def test_degree_cap():
    with pytest.raises(DomainError):
        dq_exact(ChebSeries.basis(DEGREE_CAP + 1), 0.5)


def test_sin_breve_is_sqrt_one_minus_x_squared():
    theta = np.linspace(0.1, 3.0, 7)
    assert np.allclose(sin_breve(theta_to_z(theta)), np.sin(theta))
