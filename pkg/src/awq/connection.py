"""Connection coefficients between two continuous q-Jacobi families.

Source family S(a, b) = (a, b, a q^{1/2}, b q^{1/2}) and target family
T(a, b) = (a q^{1/2}, b q^{1/2}, a q, b q) = S(a q^{1/2}, b q^{1/2}):

    p_n(x; S(a, b)) = sum_{j <= n} c_{n,j}(a, b) p_j(x; T(a, b)).

Combining the lowering relation in both families gives the step

    c_{n,j}(a, b) = R(n, j; a, b) c_{n-1,j-1}(a q^{1/2}, b q^{1/2}),

and the weight ratio w(T) / w(S) = (1 - 2ax + a^2)(1 - 2bx + b^2), a
quadratic, makes c_{m,0} vanish for m > 2. Hence c_{n,j} = 0 for j < n - 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .askey_wilson import AWParams, aw_poly, default_grid, norm_xi
from .chebpoly import ChebSeries
from .checks import CheckResult, combine
from .errors import ConditioningError, DomainError
from .quadrature import QuadratureRule, inner_weighted

__all__ = [
    "AlphaConstants",
    "ConnectionTable",
    "alphas",
    "connection_check",
    "connection_closed",
    "connection_oracle",
    "source_params",
    "step_ratio",
    "target_params",
]

#: largest acceptable ratio of the extreme diagonal entries in the triangular solve
CONDITION_LIMIT = 1e12


def _check_ab(a: float, b: float):
    if not (abs(a) < 1 and abs(b) < 1):
        raise DomainError(f"connection coefficients need |a|, |b| < 1, got a={a}, b={b}")


def source_params(a: float, b: float, q: float) -> AWParams:
    s = math.sqrt(q)
    return AWParams(q, a, b, a * s, b * s)


def target_params(a: float, b: float, q: float) -> AWParams:
    s = math.sqrt(q)
    return source_params(a * s, b * s, q)


@dataclass(frozen=True)
class AlphaConstants:
    """w(T) / w(S) = alpha_0 + alpha_1 p_1(x; S) + alpha_2 p_2(x; S)."""

    alpha0: float
    alpha1: float
    alpha2: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha0, self.alpha1, self.alpha2)

    def series(self, a: float, b: float, q: float) -> ChebSeries:
        p = source_params(a, b, q)
        return self.alpha0 + aw_poly(1, p) * self.alpha1 + aw_poly(2, p) * self.alpha2


def alphas(a: float, b: float, q: float) -> AlphaConstants:
    """Expansion constants of the weight ratio in the source family.

    With c = a q^{1/2}, d = b q^{1/2} and abcd = a^2 b^2 q:

        alpha_2 = ab / ((1 - abcd q)(1 - abcd q^2))
        alpha_1 = -(a + b)(1 - ab q) / ((1 + ab q^{1/2})(1 + ab q^{3/2}))
        alpha_0 = (ab-1)(ac-1)(ad-1)(bc-1)(bd-1)(abq-1) / ((1 - abcd)(1 - abcd q))
    """
    _check_ab(a, b)
    p = source_params(a, b, q)
    t = p.abcd
    s = math.sqrt(q)
    ab = a * b
    alpha2 = ab / ((1 - t * q) * (1 - t * q * q))
    alpha1 = -(a + b) * (1 - ab * q) / ((1 + ab * s) * (1 + ab * q * s))
    # the six pair factors; cd = ab q supplies the (abq - 1)
    alpha0 = math.prod(u - 1 for u in p.pair_products()) / ((1 - t) * (1 - t * q))
    return AlphaConstants(alpha0, alpha1, alpha2)


def step_ratio(n: int, j: int, a: float, b: float, q: float) -> float:
    """c_{n,j}(a, b) / c_{n-1,j-1}(a q^{1/2}, b q^{1/2}).

    q^{(j-n)/2} (1 - q^n)(1 - a^2 b^2 q^n) / ((1 - q^j)(1 - a^2 b^2 q^{j+2})).
    """
    t = (a * b) ** 2
    return q ** ((j - n) / 2) * (1 - q**n) * (1 - t * q**n) / ((1 - q**j) * (1 - t * q ** (j + 2)))


def base_coefficient(m: int, a: float, b: float, q: float) -> float:
    """c_{m,0}(a, b) = alpha_m xi_m(S) / xi_0(T) for m <= 2, and 0 beyond."""
    if m > 2:
        return 0.0
    al = alphas(a, b, q).as_tuple()[m]
    return al * norm_xi(m, source_params(a, b, q)) / norm_xi(0, target_params(a, b, q))


def connection_closed(n: int, j: int, a: float, b: float, q: float) -> float:
    """c_{n,j}(a, b) from the step ratio telescoped down to a base coefficient."""
    if not 0 <= j <= n:
        raise DomainError(f"need 0 <= j <= n, got n={n}, j={j}")
    _check_ab(a, b)
    if n - j > 2:
        return 0.0
    s = math.sqrt(q)
    out = 1.0
    for i in range(j):
        out *= step_ratio(n - i, j - i, a * s**i, b * s**i, q)
    return out * base_coefficient(n - j, a * s**j, b * s**j, q)


@dataclass(frozen=True)
class ConnectionTable:
    """Coefficients c_{n,0}..c_{n,n} for the source parameters (a, b, q).

    ``c`` holds the quadrature projection; ``c_solve`` the triangular solve.
    """

    n: int
    a: float
    b: float
    q: float
    c: np.ndarray
    c_solve: np.ndarray
    condition: float

    @property
    def oracle_agreement(self) -> float:
        return float(np.max(np.abs(self.c - self.c_solve)) / np.max(np.abs(self.c_solve)))

    def reconstruct(self, x, coeffs=None) -> np.ndarray:
        """sum_j c_{n,j} p_j(x; T(a, b))."""
        c = self.c if coeffs is None else coeffs
        tp = target_params(self.a, self.b, self.q)
        return sum(cj * aw_poly(j, tp)(x) for j, cj in enumerate(c))

    def reconstruction_residual(self, grid=None) -> float:
        x = default_grid(32) if grid is None else np.asarray(grid, dtype=float)
        ref = aw_poly(self.n, source_params(self.a, self.b, self.q))(x)
        return float(np.max(np.abs(self.reconstruct(x) - ref)) / np.max(np.abs(ref)))


def _project(n: int, a: float, b: float, q: float, rule: QuadratureRule) -> np.ndarray:
    sp, tp = source_params(a, b, q), target_params(a, b, q)
    pn = aw_poly(n, sp)
    return np.array([float(np.real(inner_weighted(pn, aw_poly(j, tp), tp, rule))) / norm_xi(j, tp)
                     for j in range(n + 1)])


def _solve(n: int, a: float, b: float, q: float) -> tuple[np.ndarray, float]:
    tp = target_params(a, b, q)
    M = np.column_stack([aw_poly(j, tp).trim().padded(n + 1) for j in range(n + 1)])
    diag = np.abs(np.diag(M))
    cond = float(diag.max() / diag.min()) if diag.min() > 0 else math.inf
    if cond > CONDITION_LIMIT:
        raise ConditioningError(f"diagonal ratio {cond:.3g} exceeds {CONDITION_LIMIT:g}")
    rhs = aw_poly(n, source_params(a, b, q)).trim().padded(n + 1)
    return solve_triangular(M, rhs, lower=False), cond


def connection_oracle(n: int, a: float, b: float, q: float, rule: QuadratureRule | None = None) -> ConnectionTable:
    """Connection coefficients by quadrature projection and by a triangular solve."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    _check_ab(a, b)
    rule = rule or QuadratureRule(128)
    c_quad = _project(n, a, b, q, rule)
    c_solve, cond = _solve(n, a, b, q)
    return ConnectionTable(n, a, b, q, c_quad, c_solve, cond)


def _rel(x, y, scale) -> float:
    return float(np.max(np.abs(np.asarray(x) - np.asarray(y))) / scale)


def connection_check(nmax: int, a: float, b: float, q: float, rule: QuadratureRule | None = None,
                     tol: float = 1e-9) -> CheckResult:
    """Closed form against both oracles, banded structure, step ratio and reconstruction, n <= nmax."""
    rule = rule or QuadratureRule(128)
    s = math.sqrt(q)
    closed_vs, agree, band, recon, step = 0.0, 0.0, 0.0, 0.0, 0.0
    for n in range(nmax + 1):
        tab = connection_oracle(n, a, b, q, rule)
        closed = np.array([connection_closed(n, j, a, b, q) for j in range(n + 1)])
        scale = np.max(np.abs(tab.c_solve))
        closed_vs = max(closed_vs, _rel(closed, tab.c, scale), _rel(closed, tab.c_solve, scale))
        agree = max(agree, tab.oracle_agreement)
        if n > 2:
            band = max(band, float(np.max(np.abs(tab.c_solve[: n - 2]))) / scale)
        recon = max(recon, tab.reconstruction_residual())
        if n >= 1:
            inner = connection_oracle(n - 1, a * s, b * s, q, rule).c_solve
            for j in range(1, n + 1):
                # the step is only testable where the coefficient is not structurally zero
                if n - j <= 2 and abs(inner[j - 1]) > 1e-12 * np.max(np.abs(inner)):
                    got = tab.c_solve[j] / inner[j - 1]
                    step = max(step, abs(got / step_ratio(n, j, a, b, q) - 1))
    parts = [
        CheckResult("connection_closed_vs_oracles", "Eqs. (4.9)-(4.14)", closed_vs, tol),
        CheckResult("connection_oracle_agreement", "Eq. (4.8)", agree, tol),
        CheckResult("connection_banded", "Eq. (4.14)", band, 1e-10),
        CheckResult("connection_reconstruction", "Eq. (1.18)", recon, tol),
        CheckResult("connection_step_ratio", "Eq. (4.9)", step, 1e-8),
    ]
    return combine("connection", "Eqs. (1.18), (4.8)-(4.14)", parts, tol,
                   {"nmax": nmax, "a": a, "b": b, "q": q, "nodes": rule.N})
