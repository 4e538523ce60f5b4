import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import awq.connection as cn
from awq.askey_wilson import default_grid, weight_sqrt_scaled
from awq.connection import (
    alphas,
    base_coefficient,
    connection_check,
    connection_closed,
    connection_oracle,
    source_params,
    step_ratio,
    target_params,
)
from awq.errors import ConditioningError, DomainError
from awq.quadrature import QuadratureRule

A, B, Q = 0.3, -0.2, 0.5
RULE = QuadratureRule(128)
ab_values = st.floats(-0.85, 0.85)


def test_families():
    s, t = source_params(A, B, Q), target_params(A, B, Q)
    r = math.sqrt(Q)
    assert s.params == pytest.approx((A, B, A * r, B * r))
    assert t.params == pytest.approx((A * r, B * r, A * Q, B * Q))


@given(a=ab_values, b=ab_values, q=st.floats(0.2, 0.8))
def test_weight_ratio_expansion(a, b, q):
    x = default_grid(32)
    ratio = weight_sqrt_scaled(x, target_params(a, b, q)) / weight_sqrt_scaled(x, source_params(a, b, q))
    assert np.allclose(ratio, (1 - 2 * a * x + a * a) * (1 - 2 * b * x + b * b), rtol=1e-12)
    assert np.allclose(alphas(a, b, q).series(a, b, q)(x), ratio, rtol=1e-9, atol=1e-12)


def test_alpha_special_values():
    assert alphas(0.0, 0.0, Q).alpha2 == 0.0
    a1 = alphas(A, B, Q).alpha1
    assert alphas(-A, -B, Q).alpha1 == pytest.approx(-a1, rel=1e-15)


def test_trivial_and_invalid_indices():
    assert connection_closed(0, 0, A, B, Q) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(DomainError):
        connection_closed(2, 3, A, B, Q)
    with pytest.raises(DomainError):
        connection_oracle(2, 1.2, B, Q)


@pytest.mark.parametrize("n", range(0, 9))
def test_closed_form_against_oracles(n):
    tab = connection_oracle(n, A, B, Q, RULE)
    closed = np.array([connection_closed(n, j, A, B, Q) for j in range(n + 1)])
    scale = np.max(np.abs(tab.c_solve))
    assert np.max(np.abs(closed - tab.c)) < 1e-9 * scale
    assert np.max(np.abs(closed - tab.c_solve)) < 1e-9 * scale
    assert tab.oracle_agreement < 1e-9
    assert tab.reconstruction_residual() < 1e-9
    if n > 2:
        assert np.max(np.abs(tab.c_solve[: n - 2])) < 1e-10 * scale
        assert all(connection_closed(n, j, A, B, Q) == 0.0 for j in range(n - 2))


def test_step_ratio_from_oracles():
    r = math.sqrt(Q)
    for n in range(1, 9):
        outer = connection_oracle(n, A, B, Q, RULE).c_solve
        inner = connection_oracle(n - 1, A * r, B * r, Q, RULE).c_solve
        for j in range(max(1, n - 2), n + 1):
            assert outer[j] / inner[j - 1] == pytest.approx(step_ratio(n, j, A, B, Q), rel=1e-8)


def test_base_cases():
    for m in range(5):
        oracle = connection_oracle(m, A, B, Q, RULE).c_solve[0]
        assert oracle == pytest.approx(base_coefficient(m, A, B, Q), rel=1e-9, abs=1e-12)
    assert base_coefficient(3, A, B, Q) == 0.0


@pytest.mark.parametrize("a,b,q", [(0.7, 0.5, 0.3), (-0.6, 0.8, 0.8), (0.1, 0.0, 0.4)])
def test_full_check_other_parameters(a, b, q):
    assert connection_check(8, a, b, q, RULE).passed


def test_conditioning_guard(monkeypatch):
    monkeypatch.setattr(cn, "CONDITION_LIMIT", 1.0)
    with pytest.raises(ConditioningError):
        connection_oracle(4, A, B, Q, RULE)
