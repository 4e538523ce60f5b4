"""q-shifted factorials, basic hypergeometric series and the q-series identities.

Every routine accepts real or complex scalars. ``qpoch`` additionally accepts
numpy arrays for its first argument, which is how the weight function gets
evaluated at a whole quadrature grid in one call.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from .checks import CheckResult
from .errors import ConvergenceError, DomainError, InvalidInputError, PoleError

INF = math.inf

#: default truncation threshold for infinite products
PRODUCT_TOL = 1e-17


def check_base(q):
    """Validate 0 < q < 1; the value is returned with its numeric type intact."""
    if not (0.0 < float(q) < 1.0):
        raise InvalidInputError(f"base q must satisfy 0 < q < 1, got {q!r}")
    return q


def _check_finite(a):
    if isinstance(a, np.ndarray):
        ok = bool(np.all(np.isfinite(a)))
    else:
        ok = cmath.isfinite(complex(a))
    if not ok:
        raise InvalidInputError(f"non-finite argument {a!r}")


def _is_infinite(order) -> bool:
    return order == INF


def qpoch(a, q: float, order=INF, tol: float = PRODUCT_TOL, full_output: bool = False):
    """Return the q-shifted factorial (a; q)_order.

    Parameters
    ----------
    a : scalar or ndarray
        Real or complex argument(s).
    q : float
        Base, 0 < q < 1.
    order : int or INF
        Finite order n >= 0, or ``INF`` for the infinite product.
    tol : float
        Infinite products stop at the first K with max|a| q^K < tol.
    full_output : bool
        If True, also return a dict with the number of factors used.
    """
    q = check_base(q)
    _check_finite(a)
    scalar = not isinstance(a, np.ndarray)
    if _is_infinite(order):
        if not tol > 0:
            raise InvalidInputError("tol must be positive for infinite products")
        amax = abs(complex(a)) if scalar else (float(np.max(np.abs(a))) if a.size else 0.0)
        if amax == 0.0:
            nfac = 0
        else:
            # first K with amax * q**K < tol
            nfac = max(0, math.ceil(math.log(tol / amax) / math.log(float(q))))
            while amax * float(q) ** nfac >= tol:
                nfac += 1
        truncated = True
    else:
        if int(order) != order or order < 0:
            raise InvalidInputError(f"order must be a nonnegative integer or INF, got {order!r}")
        nfac = int(order)
        truncated = False
    # scalars keep their own arithmetic (float, complex, Fraction, mpmath)
    value = a * 0 + 1 if scalar else np.ones(a.shape, dtype=np.result_type(a, float))
    qk = 1
    for _ in range(nfac):
        value = value * (1 - a * qk)
        qk = qk * q
    if scalar and isinstance(value, int):
        value = float(value)
    if full_output:
        return value, {"factors": nfac, "truncated": truncated}
    return value


def qpoch_multi(args: Sequence, q: float, order=INF, tol: float = PRODUCT_TOL):
    """Return (a_1, ..., a_k; q)_order, the product of ``qpoch`` over ``args``."""
    out = 1
    for a in args:
        out = out * qpoch(a, q, order, tol)
    return float(out) if isinstance(out, int) else out


def qpoch_signed(a, q: float, n: int):
    """(a; q)_n for any integer n, using (a; q)_{-n} = 1 / (a q^{-n}; q)_n."""
    if n >= 0:
        return qpoch(a, q, n)
    m = -n
    den = qpoch(a * q**-m, q, m)
    if den == 0:
        raise PoleError(f"(a;q)_{n} has a pole at a={a!r}")
    return 1.0 / den


def _termination_index(numerator, q, max_terms, terminate_at):
    if terminate_at is not None:
        return int(terminate_at)
    for u in numerator:
        if u == 0:
            continue
        m = -math.log(abs(complex(u))) / math.log(float(q))
        mi = round(m)
        if 0 <= mi <= max_terms and abs(u - q**-mi) < 1e-12 * abs(u):
            return mi
    return None


def phi(numerator: Sequence, denominator: Sequence, q: float, z, max_terms: int = 500,
        tol: float = 1e-16, terminate_at: int | None = None, full_output: bool = False):
    """Sum the basic hypergeometric series r_phi_s(numerator; denominator; q, z).

    A series terminates when some numerator parameter equals q^{-m}; pass
    ``terminate_at=m`` to state this exactly instead of relying on floating
    recognition of the parameter. Non-terminating series are summed until a
    term falls below ``tol`` times the running sum.
    """
    q = check_base(q)
    for v in (*numerator, *denominator, z):
        _check_finite(v)
    r, s = len(numerator), len(denominator)
    m = _termination_index(numerator, q, max_terms, terminate_at)
    if m is None:
        if r > s + 1 or (r == s + 1 and abs(z) >= 1):
            raise ConvergenceError("non-terminating series outside its disc of convergence")
    extra = 1 + s - r
    total = 1
    term = 1
    k = 0
    limit = m if m is not None else max_terms
    converged = m is not None
    while k < limit:
        num = 1.0
        for u in numerator:
            num *= 1 - u * q**k
        den = 1 - q ** (k + 1)
        for v in denominator:
            f = 1 - v * q**k
            if f == 0:
                raise PoleError(f"denominator parameter {v!r} vanishes at index {k + 1}")
            den *= f
        term = term * num / den * z
        if extra:
            term *= (-(q**k)) ** extra
        total = total + term
        k += 1
        if m is None and abs(term) <= tol * abs(total):
            converged = True
            break
    if not converged:
        raise ConvergenceError(f"series did not converge within {max_terms} terms")
    if full_output:
        return total, {"terms": k + 1, "terminating": m is not None}
    return total


def jackson_dq(power_coeffs: Sequence[float], q: float) -> list[float]:
    """Jackson q-derivative (f(x) - f(qx)) / ((1 - q) x) on power-basis coefficients."""
    q = check_base(q)
    c = list(power_coeffs)
    return [c[n] * (1 - q**n) / (1 - q) for n in range(1, len(c))]


def _rel(lhs, rhs) -> tuple[float, str]:
    # products that vanish exactly are compared in absolute terms
    scale = abs(rhs)
    if scale < 1e-12:
        return abs(lhs - rhs), "absolute"
    return abs(lhs - rhs) / scale, "relative"


def check_q_binomial(b, z, q: float, terms: int = 60, tol: float = 1e-11) -> CheckResult:
    """Compare the partial q-binomial sum with (bz; q)_inf / (z; q)_inf."""
    q = check_base(q)
    if abs(z) >= 1:
        raise DomainError("the q-binomial series needs |z| < 1")
    lhs = 0.0
    term = 1.0
    for n in range(terms):
        lhs += term
        term = term * (1 - b * q**n) / (1 - q ** (n + 1)) * z
    # |(b;q)_n / (q;q)_n| <= (-|b|;q)_inf / (q;q)_inf
    bound_coeff = qpoch(-abs(b), q) / qpoch(q, q)
    rhs = qpoch(b * z, q) / qpoch(z, q)
    res, mode = _rel(lhs, rhs)
    bound = bound_coeff * abs(z) ** terms / (1 - abs(z))
    return CheckResult(
        "q_binomial", "Eq. (4.1)", float(res), tol,
        {"terms": terms, "lhs": lhs, "rhs": rhs, "tail_bound": bound, "mode": mode},
    )


def check_1psi1(a, b, z, q: float, terms: int = 60, tol: float = 1e-11) -> CheckResult:
    """Compare the symmetric partial sum of Ramanujan's 1psi1 with its product form."""
    q = check_base(q)
    if not (abs(b / a) < abs(z) < 1):
        raise DomainError("1psi1 needs |b/a| < |z| < 1")
    lhs = 0.0
    term = 1.0
    for n in range(terms + 1):
        lhs += term
        term = term * (1 - a * q**n) / (1 - b * q**n) * z
    # negative indices: (a;q)_{-n} / (b;q)_{-n} = prod_{k=1}^{n} (1 - b q^{-k}) / (1 - a q^{-k}),
    # accumulated as a running ratio since each product alone overflows
    term = 1.0
    for n in range(1, terms + 1):
        den = 1 - a * q**-n
        if den == 0:
            raise PoleError(f"a = q^{n} puts a pole in the bilateral sum")
        term = term * (1 - b * q**-n) / den / z
        lhs += term
    num = qpoch_multi([q, b / a, a * z, q / (a * z)], q)
    den = qpoch_multi([b, q / a, z, b / (a * z)], q)
    rhs = num / den
    res, mode = _rel(lhs, rhs)
    r_pos, r_neg = abs(z), abs(b / (a * z))
    bound = {"positive_ratio": r_pos, "negative_ratio": r_neg,
             "geometric_tail": r_pos**terms / (1 - r_pos) + r_neg**terms / (1 - r_neg)}
    return CheckResult(
        "ramanujan_1psi1", "Eq. (4.3)", float(res), tol,
        {"terms": terms, "lhs": lhs, "rhs": rhs, "tail_bound": bound, "mode": mode},
    )


def triple_product_sum(z, q: float, terms: int) -> complex | float:
    """Symmetric partial sum of sum_k (-1)^k q^{k^2/2} z^k over |k| <= terms."""
    total = 1.0
    for k in range(1, terms + 1):
        c = (-1) ** k * q ** (k * k / 2)
        total += c * (z**k + z**-k)
    return total


def check_triple_product(z, q: float, terms: int = 40, tol: float = 1e-11) -> CheckResult:
    """Jacobi triple product: bilateral theta sum against (q, sqrt(q) z, sqrt(q)/z; q)_inf."""
    q = check_base(q)
    if z == 0:
        raise DomainError("triple product needs z != 0")
    sq = math.sqrt(q)
    lhs = triple_product_sum(z, q, terms)
    rhs = qpoch_multi([q, sq * z, sq / z], q)
    res, mode = _rel(lhs, rhs)
    zmax = max(abs(z), 1 / abs(z))
    n1 = terms + 1
    bound = 2 * q ** (n1 * n1 / 2) * zmax**n1 / max(1e-300, 1 - q ** (n1 + 0.5) * zmax)
    return CheckResult(
        "jacobi_triple_product", "Eq. (3.12)", float(res), tol,
        {"terms": terms, "lhs": lhs, "rhs": rhs, "tail_bound": bound, "mode": mode},
    )

