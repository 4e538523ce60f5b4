"""Askey-Wilson polynomials p_n(x; a, b, c, d | q) and their structure relations.

Conventions: x = cos(theta), z = e^{i theta}. The weight carries the
(1 - x^2)^{-1/2} factor, so that

    int_{-1}^{1} p_m(x) p_n(x) w(x) dx = xi_n delta_{mn}.

``shift(p, k)`` multiplies all four parameters by q^{k/2}; the lowering and
raising relations move between p and shift(p, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import mpmath
import numpy as np

from .chebpoly import (
    ChebSeries,
    DEGREE_CAP,
    cheb_mul_list,
    dq_exact,
    dq_iterated,
    dq_pointwise,
    eval_breve,
    x_to_z,
)
from .checks import CheckResult, combine
from .errors import DomainError, InvalidInputError, ParameterRoleError, SingularityError
from .qcore import PRODUCT_TOL, check_base, phi, qpoch, qpoch_multi


@dataclass(frozen=True)
class AWParams:
    q: float
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        check_base(self.q)
        for name in "abcd":
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidInputError(f"parameter {name} is not finite")

    @property
    def abcd(self) -> float:
        return self.a * self.b * self.c * self.d

    @property
    def params(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def pair_products(self) -> list[float]:
        """ab, ac, ad, bc, bd, cd."""
        return [u * v for u, v in combinations(self.params, 2)]

    def shift(self, k: int = 1) -> "AWParams":
        f = self.q ** (k / 2)
        return replace(self, a=self.a * f, b=self.b * f, c=self.c * f, d=self.d * f)

    def with_params(self, a, b, c, d) -> "AWParams":
        return replace(self, a=a, b=b, c=c, d=d)

    def require_weight_region(self):
        # |u| = 1 is admitted: the Chebyshev special cases sit on that boundary
        if any(abs(u) > 1 for u in self.params):
            raise DomainError(f"weight operations need |a|,|b|,|c|,|d| <= 1, got {self.params}")
        if abs(self.abcd) >= 1:
            raise DomainError("weight operations need |abcd| < 1")
        return self


#: canonical verification fixture (q, a, b, c, d)
CANONICAL = AWParams(0.5, 0.3, -0.2, 0.4, 0.1)


def chebyshev_t_params(q: float) -> AWParams:
    """Parameters for which p_n is a multiple of T_n and w = (1 - x^2)^{-1/2}."""
    s = math.sqrt(q)
    return AWParams(q, 1.0, -1.0, s, -s)


def chebyshev_u_params(q: float) -> AWParams:
    """Parameters for which p_n is a multiple of U_n and w = 4 (1 - x^2)^{1/2}."""
    s = math.sqrt(q)
    return AWParams(q, s, -s, q, -q)


def _a_slot(p: AWParams) -> AWParams | None:
    """Return p with a nonzero parameter in the a slot, or None if all vanish."""
    if p.a != 0:
        return p
    vals = list(p.params)
    i = max(range(4), key=lambda k: abs(vals[k]))
    if vals[i] == 0:
        return None
    vals[0], vals[i] = vals[i], vals[0]
    return p.with_params(*vals)


def _factor(alpha):
    # 1 - 2 alpha x + alpha^2, the z-side form of (1 - alpha z)(1 - alpha / z)
    return [1 + alpha * alpha, -2 * alpha]


def pochhammer_basis(a: float, q: float, k: int) -> ChebSeries:
    """(a e^{i theta}, a e^{-i theta}; q)_k as a polynomial in x."""
    out = ChebSeries.constant(1.0)
    for j in range(k):
        out = out * ChebSeries(_factor(a * q**j))
    return out


def aw_poly(n: int, p: AWParams) -> ChebSeries:
    """Expand p_n(x; a, b, c, d | q) into the Chebyshev-T basis.

    The terminating 4phi3 is summed in exact rational arithmetic on the
    binary values of the inputs and rounded once at the end: its terms are
    many orders of magnitude larger than p_n itself, so a floating sum
    loses roughly 1.5 digits per degree.

    The prefactor is folded in as a^{-n} (ab q^k, ac q^k, ad q^k; q)_{n-k},
    so nothing is divided by (ab; q)_k. When a = 0 the largest parameter is
    rotated into the a slot (p_n is symmetric in all four); if all four
    vanish the a -> 0 limit is taken by extracting the a^n coefficient of
    each term.
    """
    if n < 0:
        raise DomainError("degree must be nonnegative")
    if n > DEGREE_CAP:
        raise DomainError(f"degree {n} exceeds the cap {DEGREE_CAP}")
    return _aw_poly_cached(n, p)


@lru_cache(maxsize=4096)
def _aw_poly_cached(n: int, p: AWParams) -> ChebSeries:
    pr = _a_slot(p)
    if pr is None:
        coeffs = _aw_poly_zero_params(n, Fraction(p.q))
    else:
        coeffs = _aw_poly_exact(n, Fraction(p.q), *(Fraction(u) for u in pr.params))
    return ChebSeries([float(c) for c in coeffs]).trim()


def _aw_poly_exact(n, q, a, b, c, d):
    abcd = a * b * c * d
    total = [Fraction(0)] * (n + 1)
    basis = [Fraction(1)]
    for k in range(n + 1):
        if k:
            basis = cheb_mul_list(basis, _factor(a * q ** (k - 1)))
        coef = (
            qpoch(q**-n, q, k) * qpoch(abcd * q ** (n - 1), q, k) * q**k / qpoch(q, q, k)
            * qpoch_multi([a * b * q**k, a * c * q**k, a * d * q**k], q, n - k)
        )
        for j, bj in enumerate(basis):
            total[j] += coef * bj
    return [t / a**n for t in total]


def _aw_poly_zero_params(n: int, q):
    # coefficient of a^n in sum_k (q^-n;q)_k q^k/(q;q)_k prod_{j<k}(1 - 2 a q^j x + a^2 q^2j)
    total = [Fraction(0)] * (n + 1)
    powers = [[Fraction(1)]]  # powers[m] = coefficient list of a^m
    for k in range(n + 1):
        if k:
            j = k - 1
            new = [[Fraction(0)] for _ in range(len(powers) + 2)]
            for m, cm in enumerate(powers):
                new[m] = _list_add(new[m], cm)
                new[m + 1] = _list_add(new[m + 1], cheb_mul_list(cm, [0, -2 * q**j]))
                new[m + 2] = _list_add(new[m + 2], [v * q ** (2 * j) for v in cm])
            powers = new[: n + 1]
        if len(powers) > n:
            coef = qpoch(q**-n, q, k) * q**k / qpoch(q, q, k)
            total = _list_add(total, [coef * v for v in powers[n]])
    return total


def _list_add(f, g):
    out = list(f) + [0] * (len(g) - len(f))
    for i, v in enumerate(g):
        out[i] += v
    return out


def _direct_precision(n: int, p: AWParams) -> int:
    # decimal digits lost to cancellation in the 4phi3 sum, plus a margin
    loss = n * (n + 1) / 2 * math.log10(1 / p.q) + n * math.log10(1 / max(1e-3, min(1.0, abs(p.a) or 1.0)))
    return int(30 + loss)


def aw_eval_direct(n: int, p: AWParams, theta):
    """Evaluate p_n(cos theta) straight from the terminating 4phi3 via ``phi``.

    The sum runs in extended precision (mpmath) sized to the cancellation in
    its terms; the result is returned as a float.
    """
    pr = _a_slot(p)
    if pr is None:
        raise ParameterRoleError("the 4phi3 form needs a nonzero parameter")
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.empty(thetas.shape)
    with mpmath.workdps(_direct_precision(n, pr)):
        q = mpmath.mpf(pr.q)
        a, b, c, d = (mpmath.mpf(u) for u in pr.params)
        pref = a**-n * qpoch_multi([a * b, a * c, a * d], q, n)
        for i, th in enumerate(thetas):
            e = mpmath.expj(mpmath.mpf(th))
            s = phi([q**-n, a * b * c * d * q ** (n - 1), a * e, a / e], [a * b, a * c, a * d], q, q,
                    terminate_at=n)
            out[i] = float(mpmath.re(pref * s))
    return out[0] if np.ndim(theta) == 0 else out


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Coefficients of 2x p_n = A p_{n+1} + B p_n + C p_{n-1}."""

    n: int
    A: float
    B: float
    C: float


def recurrence_coeffs(n: int, p: AWParams) -> RecurrenceCoeffs:
    if n < 0:
        raise DomainError("n must be nonnegative")
    if p.a == 0:
        raise ParameterRoleError("B_n contains 1/a; rotate a nonzero parameter into the a slot")
    q = p.q
    a, b, c, d = p.params
    t = p.abcd
    if n == 0:
        # (1 - abcd q^{n-1}) cancels against (1 - abcd q^{2n-1})
        A = 1 / (1 - t)
        C = 0.0
        C_tilde = 0.0
    else:
        A = (1 - t * q ** (n - 1)) / ((1 - t * q ** (2 * n - 1)) * (1 - t * q ** (2 * n)))
        den = (1 - t * q ** (2 * n - 2)) * (1 - t * q ** (2 * n - 1))
        top = (1 - q**n) * (1 - b * c * q ** (n - 1)) * (1 - b * d * q ** (n - 1)) * (1 - c * d * q ** (n - 1))
        C = top * (1 - a * b * q ** (n - 1)) * (1 - a * c * q ** (n - 1)) * (1 - a * d * q ** (n - 1)) / den
        C_tilde = a * top / den
    A_tilde = A * (1 - a * b * q**n) * (1 - a * c * q**n) * (1 - a * d * q**n) / a
    B = a + 1 / a - A_tilde - C_tilde
    return RecurrenceCoeffs(n, A, B, C)


def aw_poly_recurrence(n: int, p: AWParams) -> ChebSeries:
    """Build p_n by forward three-term recurrence from p_0 = 1 and p_1."""
    if n < 0:
        raise DomainError("degree must be nonnegative")
    if p.a == 0:
        raise ParameterRoleError("the recurrence needs a != 0")
    prev, cur = ChebSeries.constant(1.0), aw_poly(1, p)
    if n == 0:
        return prev
    two_x = ChebSeries([0.0, 2.0])
    for m in range(1, n):
        r = recurrence_coeffs(m, p)
        prev, cur = cur, ((two_x - r.B) * cur - prev * r.C) / r.A
    return cur


def leading_coefficient(n: int, p: AWParams) -> float:
    """Coefficient of x^n in p_n: 2^n (abcd q^{n-1}; q)_n."""
    return 2.0**n * qpoch(p.abcd * p.q ** (n - 1), p.q, n)


def eigenvalue_lambda(n: int, p: AWParams) -> float:
    """4 q (1 - q^{-n}) (1 - abcd q^{n-1}) / (1 - q)^2."""
    q = p.q
    return 4 * q * (1 - q**-n) * (1 - p.abcd * q ** (n - 1)) / (1 - q) ** 2


def norm_xi(n: int, p: AWParams, tol: float = PRODUCT_TOL) -> float:
    """Squared weighted norm xi_n of p_n."""
    q = p.q
    t = p.abcd
    num = 2 * math.pi * qpoch(t * q ** (n - 1), q, n) * qpoch(t * q ** (2 * n), q, tol=tol)
    den = qpoch(q ** (n + 1), q, tol=tol) * qpoch_multi([u * q**n for u in p.pair_products()], q, tol=tol)
    return float(np.real(num / den))


def aw_integral_closed(p: AWParams, tol: float = PRODUCT_TOL) -> float:
    """2 pi (abcd; q)_inf / (q, ab, ac, ad, bc, bd, cd; q)_inf."""
    q = p.q
    num = 2 * math.pi * qpoch(p.abcd, q, tol=tol)
    den = qpoch(q, q, tol=tol) * qpoch_multi(p.pair_products(), q, tol=tol)
    return float(num / den)


def _weight_core(z, p: AWParams, tol):
    # (z^2, z^-2; q)_inf / prod_u (u z, u / z; q)_inf
    q = p.q
    num = qpoch(z * z, q, tol=tol) * qpoch(1 / (z * z), q, tol=tol)
    den = 1.0
    for u in p.params:
        den = den * qpoch(u * z, q, tol=tol) * qpoch(u / z, q, tol=tol)
    return num / den


def weight(x, p: AWParams, tol: float = PRODUCT_TOL):
    """Askey-Wilson weight w(x) on (-1, 1), including the (1 - x^2)^{-1/2} factor."""
    p.require_weight_region()
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise DomainError("weight is defined for |x| < 1")
    z = x_to_z(x)
    w = np.real(_weight_core(z, p, tol)) / np.sqrt(1 - x * x)
    return w[()] if w.ndim == 0 else w


def weight_sqrt_scaled(x, p: AWParams, tol: float = PRODUCT_TOL):
    """w(x) sqrt(1 - x^2): the smooth part of the weight, for quadrature."""
    p.require_weight_region()
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise DomainError("weight is defined for |x| < 1")
    w = np.real(_weight_core(x_to_z(x), p, tol))
    return w[()] if w.ndim == 0 else w


def weight_breve(z, p: AWParams, tol: float = PRODUCT_TOL):
    """z-side weight with 1/sin(theta) written as 2i / (z - 1/z); w(cos t) = this at e^{it}."""
    p.require_weight_region()
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("weight_breve is undefined at z = 0")
    if np.any(np.abs(z - 1 / z) == 0):
        raise SingularityError("weight_breve is singular at z = +-1")
    out = 2j / (z - 1 / z) * _weight_core(z, p, tol)
    return out[()] if out.ndim == 0 else out


def weight_function(p: AWParams, tol: float = PRODUCT_TOL):
    return lambda z: weight_breve(z, p, tol)


def weighted_poly(p: AWParams, f: ChebSeries, tol: float = PRODUCT_TOL):
    """z-side function z -> w(z; p) f(z)."""
    return lambda z: weight_breve(z, p, tol) * eval_breve(f, z)


def lowering_constant(n: int, p: AWParams) -> float:
    """D_q p_n(x; p) = this * p_{n-1}(x; shift(p))."""
    q = p.q
    return 2 * q ** (-(n - 1) / 2) * (1 - q**n) * (1 - p.abcd * q ** (n - 1)) / (1 - q)


def raising_constant(n: int, p: AWParams) -> float:
    """D_q[w(shift(p)) p_{n-1}(shift(p))] = this * w(p) p_n(p)."""
    q = p.q
    return 2 * q ** (-(n - 1) / 2) / (q - 1)


def rodrigues_constant(n: int, q: float) -> float:
    """w p_n = this * D_q^n w(shift(p, n))."""
    return ((q - 1) / 2) ** n * q ** (n * (n - 1) / 4)


def weight_lattice_ratios(z, p: AWParams):
    """Closed forms of w(q^{+-1/2} z; shift(p)) / w(z; p).

    Returns the pair (-q^{-1/2} z^{-2} prod_u (1 - u z), -q^{-1/2} z^2 prod_u (1 - u/z)).
    """
    z = np.asarray(z, dtype=complex)
    s = math.sqrt(p.q)
    up = np.ones_like(z)
    dn = np.ones_like(z)
    for u in p.params:
        up = up * (1 - u * z)
        dn = dn * (1 - u / z)
    return -up / (s * z * z), -dn * z * z / s


def weight_dq_ratio(x, p: AWParams):
    """D_q w(x; shift(p)) / w(x; p) = 2 / (q - 1) * [2 (1 - abcd) x - e1 + e3]."""
    a, b, c, d = p.params
    e1 = a + b + c + d
    e3 = a * b * c + a * b * d + a * c * d + b * c * d
    return 2 / (p.q - 1) * (2 * (1 - p.abcd) * np.asarray(x) - e1 + e3)


def coeff_residual(f: ChebSeries, g: ChebSeries) -> float:
    """max_k |f_k - g_k| / max_k |g_k|."""
    n = max(f.coeffs.size, g.coeffs.size)
    fc, gc = f.padded(n), g.padded(n)
    scale = np.max(np.abs(gc))
    if scale == 0:
        return float(np.max(np.abs(fc)))
    return float(np.max(np.abs(fc - gc)) / scale)


def default_grid(nodes: int = 64) -> np.ndarray:
    """Interior Gauss-Chebyshev nodes cos((2k - 1) pi / (2 N))."""
    k = np.arange(1, nodes + 1)
    return np.cos((2 * k - 1) * np.pi / (2 * nodes))


def lowering_check(n: int, p: AWParams, tol: float = 1e-11) -> CheckResult:
    """D_q on p_n and on (a e^{i theta}, a e^{-i theta}; q)_n, in coefficient space."""
    if n < 1:
        raise DomainError("lowering needs n >= 1")
    q = p.q
    lhs = dq_exact(aw_poly(n, p), q)
    rhs = aw_poly(n - 1, p.shift()) * lowering_constant(n, p)
    r_poly = coeff_residual(lhs, rhs)
    pr = _a_slot(p)
    a = pr.a if pr is not None else 0.0
    lhs_b = dq_exact(pochhammer_basis(a, q, n), q)
    rhs_b = pochhammer_basis(a * math.sqrt(q), q, n - 1) * (-2 * a * (1 - q**n) / (1 - q))
    r_basis = coeff_residual(lhs_b, rhs_b) if a else float(np.max(np.abs(lhs_b.coeffs)))
    parts = [
        CheckResult(f"lowering_poly[n={n}]", "Eq. (3.4)", r_poly, tol),
        CheckResult(f"lowering_basis[n={n}]", "Eq. (3.3)", r_basis, tol),
    ]
    return combine(f"lowering[n={n}]", "Eqs. (3.3)-(3.4)", parts, tol,
                   {"constant": lowering_constant(n, p)})


def _pointwise_residual(lhs, rhs, scale):
    return float(np.max(np.abs(lhs - rhs)) / scale)


def raising_check(n: int, p: AWParams, grid=None, tol: float = 1e-8) -> CheckResult:
    """Pointwise raising relation on an interior grid.

    Both sides are divided by w(x; p) and the worst difference is measured
    against max |p_n| on the grid.
    """
    if n < 1:
        raise DomainError("raising needs n >= 1")
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    z = x_to_z(grid)
    w = weight(grid, p)
    pn = aw_poly(n, p)(grid)
    lhs = raising_constant(n, p) * pn
    sp = p.shift()
    rhs = np.real(dq_pointwise(weighted_poly(sp, aw_poly(n - 1, sp)), z, p.q)) / w
    res = _pointwise_residual(lhs, rhs, abs(raising_constant(n, p)) * np.max(np.abs(pn)))
    return CheckResult(f"raising[n={n}]", "Eq. (3.5)", res, tol,
                       {"constant": raising_constant(n, p), "nodes": int(grid.size)})


def weight_ratio_check(p: AWParams, grid=None, tol: float = 1e-10) -> CheckResult:
    """Weight ratios on the D_q lattice and D_q w(shift(p)) / w(p) as a polynomial in x."""
    grid = default_grid(32) if grid is None else np.asarray(grid, dtype=float)
    z = x_to_z(grid)
    s = math.sqrt(p.q)
    sp = p.shift()
    wz = weight_breve(z, p)
    up, dn = weight_lattice_ratios(z, p)
    r_up = np.max(np.abs(weight_breve(s * z, sp) / wz - up) / np.abs(up))
    r_dn = np.max(np.abs(weight_breve(z / s, sp) / wz - dn) / np.abs(dn))
    ratio = np.real(dq_pointwise(weight_function(sp), z, p.q) / wz)
    closed = weight_dq_ratio(grid, p)
    r_dq = np.max(np.abs(ratio - closed)) / max(1.0, np.max(np.abs(closed)))
    parts = [
        CheckResult("weight_ratio_up", "Eq. (3.6)", float(r_up), tol),
        CheckResult("weight_ratio_down", "Eq. (3.6)", float(r_dn), tol),
        CheckResult("weight_dq_ratio", "Eq. (3.7)", float(r_dq), tol),
    ]
    return combine("weight_ratio", "Eqs. (3.6)-(3.7)", parts, tol, {"nodes": int(grid.size)})


def rodrigues_check(n: int, p: AWParams, grid=None, tol: float = 1e-7, max_order: int = 5) -> CheckResult:
    """w p_n against the n-fold D_q of w(shift(p, n)), pointwise (scaled as in raising_check)."""
    if not 0 <= n <= max_order:
        raise DomainError(f"Rodrigues check supports 0 <= n <= {max_order}")
    grid = default_grid(32) if grid is None else np.asarray(grid, dtype=float)
    z = x_to_z(grid)
    w = weight(grid, p)
    pn = aw_poly(n, p)(grid)
    c = rodrigues_constant(n, p.q)
    rhs = c * np.real(dq_iterated(weight_function(p.shift(n)), z, p.q, n)) / w
    res = _pointwise_residual(pn, rhs, np.max(np.abs(pn)))
    return CheckResult(f"rodrigues[n={n}]", "Eq. (3.8)", res, tol,
                       {"constant": c, "nodes": int(grid.size)})


def xi_shift_prefactor(p: AWParams, n: int) -> float:
    """xi_0(p) / xi_0(shift(p, n)) = (abcd; q)_{2n} / prod_{pairs} (uv; q)_n."""
    q = p.q
    return float(qpoch(p.abcd, q, 2 * n) / qpoch_multi(p.pair_products(), q, n))


def xi_functional_check(p: AWParams, n: int = 1, tol: float = 1e-11) -> CheckResult:
    """xi_0(p) against prefactor * xi_0(shift(p, n)), for n steps and for one step."""
    if n < 1:
        raise DomainError("n must be >= 1")
    x0 = norm_xi(0, p)
    parts = []
    for m, ref in ((1, "Eq. (3.9)"), (n, "Eq. (3.10)")):
        rhs = xi_shift_prefactor(p, m) * aw_integral_closed(p.shift(m))
        parts.append(CheckResult(f"xi_functional[n={m}]", ref, abs(x0 - rhs) / x0, tol))
    return combine(f"xi_functional[n={n}]", "Eqs. (3.9)-(3.10)", parts, tol)


def xi_limit_check(p: AWParams, n: int | None = None, tol: float = 1e-10) -> CheckResult:
    """Large-n form: prefactor(n) * 2 pi / (q; q)_inf reproduces the closed integral.

    By default n is the first index with q^n below 1e-17, where xi_0 of the
    shifted parameters has reached its limit 2 pi / (q; q)_inf.
    """
    if n is None:
        n = math.ceil(math.log(PRODUCT_TOL) / math.log(p.q))
    approx = xi_shift_prefactor(p, n) * 2 * math.pi / qpoch(p.q, p.q)
    exact = aw_integral_closed(p)
    return CheckResult(f"xi_limit[n={n}]", "Eqs. (3.11), (3.13)", abs(approx - exact) / exact, tol,
                       {"approx": approx, "closed": exact})


def recurrence_check(n: int, p: AWParams, tol: float = 1e-12) -> CheckResult:
    """2x p_n - (A p_{n+1} + B p_n + C p_{n-1}) in coefficient space, p from aw_poly."""
    r = recurrence_coeffs(n, p)
    pn = aw_poly(n, p)
    lhs = ChebSeries([0.0, 2.0]) * pn
    rhs = aw_poly(n + 1, p) * r.A + pn * r.B
    if n:
        rhs = rhs + aw_poly(n - 1, p) * r.C
    return CheckResult(f"recurrence[n={n}]", "Eqs. (4.4)-(4.7)", coeff_residual(rhs, lhs), tol,
                       {"A": r.A, "B": r.B, "C": r.C})


def dual_construction_check(n: int, p: AWParams, tol: float = 1e-11) -> CheckResult:
    res = coeff_residual(aw_poly_recurrence(n, p), aw_poly(n, p))
    return CheckResult(f"dual_construction[n={n}]", "Eqs. (1.4), (4.4)", res, tol)


def permutations_bcd(p: AWParams) -> Sequence[AWParams]:
    from itertools import permutations

    return [p.with_params(p.a, *perm) for perm in permutations((p.b, p.c, p.d))]
