import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from awq.errors import ConvergenceError, DomainError, InvalidInputError, PoleError
from awq.qcore import (
    check_1psi1,
    check_q_binomial,
    check_triple_product,
    jackson_dq,
    phi,
    qpoch,
    qpoch_multi,
    qpoch_signed,
)

bases = st.floats(0.05, 0.9)
small = st.floats(-0.9, 0.9)


def test_finite_product_by_hand():
    q, a = 0.5, 0.3
    assert qpoch(a, q, 3) == pytest.approx((1 - a) * (1 - a * q) * (1 - a * q * q), rel=1e-15)
    assert qpoch(a, q, 0) == 1.0


def test_euler_pentagonal_number_theorem():
    # (q;q)_inf = sum_k (-1)^k q^{k(3k-1)/2} over all integers k
    q = 0.4
    series = sum((-1) ** k * q ** (k * (3 * k - 1) / 2) for k in range(-30, 31))
    assert qpoch(q, q) == pytest.approx(series, rel=1e-14)


def test_infinite_product_reports_truncation():
    value, info = qpoch(0.5, 0.5, full_output=True)
    assert info["truncated"]
    assert 0.5 * 0.5 ** info["factors"] < 1e-17
    assert 0.5 * 0.5 ** (info["factors"] - 1) >= 1e-17
    assert value == pytest.approx(0.28878809508660242, rel=1e-14)


def test_array_argument_matches_scalars():
    a = np.array([0.1, -0.4 + 0.2j, 0.7])
    got = qpoch(a, 0.6)
    assert np.allclose(got, [qpoch(complex(v), 0.6) for v in a], rtol=1e-15)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.2, 1.5, math.nan])
def test_invalid_base(q):
    with pytest.raises(InvalidInputError):
        qpoch(0.2, q, 2)


def test_nonfinite_argument_and_bad_order():
    with pytest.raises(InvalidInputError):
        qpoch(math.inf, 0.5)
    with pytest.raises(InvalidInputError):
        qpoch(0.2, 0.5, 1.5)
    with pytest.raises(InvalidInputError):
        qpoch(0.2, 0.5, -1)


@given(a=small, q=bases, m=st.integers(0, 12), n=st.integers(0, 12))
def test_product_splits(a, q, m, n):
    assert qpoch(a, q, m + n) == pytest.approx(qpoch(a, q, m) * qpoch(a * q**m, q, n), rel=1e-12, abs=1e-300)


@given(a=small, q=bases, n=st.integers(0, 10))
def test_infinite_over_shifted_is_finite(a, q, n):
    # (a;q)_inf / (a q^n; q)_inf = (a;q)_n
    assert qpoch(a, q) / qpoch(a * q**n, q) == pytest.approx(qpoch(a, q, n), rel=1e-12, abs=1e-14)


def test_negative_order():
    q, a = 0.5, 0.3
    assert qpoch_signed(a, q, -2) == pytest.approx(1 / ((1 - a / q) * (1 - a / q**2)), rel=1e-15)
    with pytest.raises(PoleError):
        qpoch_signed(q, q, -1)


def test_multi_is_product():
    assert qpoch_multi([0.1, 0.2], 0.5, 4) == pytest.approx(qpoch(0.1, 0.5, 4) * qpoch(0.2, 0.5, 4))


@given(z=st.floats(-0.9, 0.9), q=bases)
def test_euler_sum(z, q):
    # sum z^n / (q;q)_n = 1 / (z;q)_inf
    assert phi([0.0], [], q, z) == pytest.approx(1 / qpoch(z, q), rel=1e-12)


def test_q_chu_vandermonde():
    # 2phi1(q^-n, b; c; q, q) = (c/b; q)_n / (c; q)_n * b^n
    q, b, c = 0.6, 0.3, 0.45
    for n in range(5):
        lhs = phi([q**-n, b], [c], q, q, terminate_at=n)
        rhs = qpoch(c / b, q, n) / qpoch(c, q, n) * b**n
        assert lhs == pytest.approx(rhs, rel=1e-11)


def test_q_chu_vandermonde_extended_precision():
    # the alternating sum cancels for larger n; run the same code on mpmath numbers
    with mpmath.workdps(50):
        q, b, c = mpmath.mpf("0.6"), mpmath.mpf("0.3"), mpmath.mpf("0.45")
        for n in range(5, 12):
            lhs = phi([q**-n, b], [c], q, q, terminate_at=n)
            rhs = qpoch(c / b, q, n) / qpoch(c, q, n) * b**n
            assert abs(lhs / rhs - 1) < 1e-30


def test_phi_termination_detected_and_reported():
    q = 0.5
    value, info = phi([q**-3, 0.2], [0.4], q, 0.3, full_output=True)
    assert info["terminating"] and info["terms"] == 4
    assert value == pytest.approx(phi([q**-3, 0.2], [0.4], q, 0.3, terminate_at=3), rel=1e-15)


def test_phi_errors():
    with pytest.raises(ConvergenceError):
        phi([0.2, 0.3], [0.4], 0.5, 1.5)
    with pytest.raises(PoleError):
        phi([0.2], [2.0], 0.5, 0.3)
    with pytest.raises(ConvergenceError):
        phi([0.2], [], 0.999, 0.9999, max_terms=5)


def test_jackson_derivative_of_monomials():
    q = 0.3
    assert jackson_dq([1.0, 2.0, 3.0], q) == pytest.approx([2.0, 3.0 * (1 + q)])


def test_q_binomial_check():
    r = check_q_binomial(0.3, 0.5, 0.5)
    assert r.passed and r.meta["tail_bound"] < 1e-11


def test_ramanujan_check_with_pole_free_and_pole_inputs():
    assert check_1psi1(-0.8, 0.2, 0.5, 0.5).passed
    # b = q makes the negative side vanish; the sum is then a one-sided 1phi0
    assert check_1psi1(0.6, 0.5, 0.9, 0.5, terms=400).passed
    with pytest.raises(PoleError):
        check_1psi1(0.8, 0.2, 0.5, 0.8)
    with pytest.raises(DomainError):
        check_1psi1(0.2, 0.8, 0.5, 0.5)


@pytest.mark.parametrize("z", [-0.7 + 0.2j, 1j, -1.0, 2.0])
def test_triple_product(z):
    r = check_triple_product(z, 0.5)
    assert r.passed, r


def test_residual_halves_when_terms_double():
    for check, args in [(check_q_binomial, (0.3, 0.5, 0.5)), (check_1psi1, (-0.8, 0.2, 0.5, 0.5))]:
        prev = None
        for terms in (5, 10, 20, 40):
            res = check(*args, terms=terms).residual
            if prev is not None and prev > 1e-14:
                assert res <= prev / 2
            prev = res
    prev = check_triple_product(-0.7 + 0.2j, 0.8, terms=2).residual
    for terms in (4, 8):
        res = check_triple_product(-0.7 + 0.2j, 0.8, terms=terms).residual
        assert res <= prev / 2
        prev = res


def test_tail_bound_dominates_error():
    for terms in (5, 10, 20):
        r = check_q_binomial(0.3, 0.5, 0.5, terms=terms)
        assert abs(r.meta["lhs"] - r.meta["rhs"]) <= r.meta["tail_bound"]
