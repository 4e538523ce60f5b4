"""Chebyshev-T series and the Askey-Wilson divided-difference operator.

A polynomial in x = cos(theta) is stored by its coefficients in the basis
T_k(x). On the z side (z = e^{i theta}) the same polynomial is the Laurent
polynomial sum_k c_k (z^k + z^-k) / 2, which is where the operator acts:

    D_q f(x) = (f(q^{1/2} z) - f(q^{-1/2} z)) / ((q^{1/2} - q^{-1/2}) (z - 1/z) / 2)

Any callable mapping complex z to the z-side values of a function can be fed
to the pointwise routines; ChebSeries objects expose that view via ``breve``.
"""

from __future__ import annotations

import math
from typing import Callable, Union

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .errors import DomainError, SingularityError
from .qcore import check_base

BreveFunction = Callable[[np.ndarray], np.ndarray]

#: largest degree accepted by the exact coefficient-space operations
DEGREE_CAP = 64

#: |z - 1/z| at or below this is treated as the singular set z = +-1
SINGULARITY_EPS = 1e-8


class ChebSeries:
    """Immutable polynomial sum_k c_k T_k(x)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value: float) -> "ChebSeries":
        return cls([value])

    @classmethod
    def x(cls) -> "ChebSeries":
        return cls([0.0, 1.0])

    @classmethod
    def basis(cls, n: int) -> "ChebSeries":
        c = np.zeros(n + 1)
        c[n] = 1.0
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> float:
        """Index of the last nonzero coefficient; ``-inf`` for the zero polynomial."""
        nz = np.flatnonzero(self._c)
        return int(nz[-1]) if nz.size else -math.inf

    def trim(self) -> "ChebSeries":
        d = self.degree
        return ChebSeries(self._c[: int(d) + 1] if d >= 0 else [0.0])

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self._c.size))
        out[: self._c.size] = self._c
        return out

    def __call__(self, x):
        return eval_real(self, x)

    def breve(self, z):
        return eval_breve(self, z)

    def __add__(self, other):
        if not isinstance(other, ChebSeries):
            other = ChebSeries.constant(other)
        n = max(self._c.size, other._c.size)
        return ChebSeries(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return ChebSeries(-self._c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ChebSeries) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ChebSeries):
            return poly_mul(self, other)
        return ChebSeries(self._c * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return ChebSeries(self._c / scalar)

    def __repr__(self):
        return f"ChebSeries({self._c.tolist()!r})"


def eval_real(f: ChebSeries, x):
    """Evaluate sum_k c_k T_k(x) at real x.

    Inside [-1, 1] this is Clenshaw summation. Outside, T_k is continued as
    cosh(k arcosh|x|) with the parity sign, which is the form needed when a
    boundary value is taken at x = (q^{1/2} + q^{-1/2}) / 2.
    """
    x = np.asarray(x, dtype=float)
    c = f.coeffs
    inside = np.abs(x) <= 1
    if np.all(inside):
        return npcheb.chebval(x, c)
    if x.ndim == 0:
        return eval_real(f, x[None])[0]
    out = np.empty_like(x)
    out[inside] = npcheb.chebval(x[inside], c)
    xo = x[~inside]
    t = np.arccosh(np.abs(xo))
    k = np.arange(c.size)
    sign = np.where(xo < 0, -1.0, 1.0)[..., None] ** k
    out[~inside] = (c * sign * np.cosh(np.multiply.outer(t, k))).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def eval_breve(f: ChebSeries, z):
    """Evaluate the z-side form sum_k c_k (z^k + z^-k) / 2."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("the z-side form is undefined at z = 0")
    rev = f.coeffs[::-1]
    out = (np.polyval(rev, z) + np.polyval(rev, 1 / z)) / 2
    return out[()] if out.ndim == 0 else out


def as_breve(f: Union[ChebSeries, BreveFunction]) -> BreveFunction:
    return f.breve if isinstance(f, ChebSeries) else f


def poly_mul(f: ChebSeries, g: ChebSeries) -> ChebSeries:
    """Product via T_m T_n = (T_{m+n} + T_{|m-n|}) / 2."""
    return ChebSeries(npcheb.chebmul(f.coeffs, g.coeffs))


def cheb_mul_list(f: list, g: list) -> list:
    """Linearization product on plain coefficient lists of any numeric type.

    Used with ``fractions.Fraction`` entries where the expansion must be exact.
    """
    out = [0] * (len(f) + len(g) - 1)
    for m, fm in enumerate(f):
        if not fm:
            continue
        for n, gn in enumerate(g):
            t = fm * gn / 2
            out[m + n] += t
            out[abs(m - n)] += t
    return out


def sin_breve(z):
    """z-side form of sqrt(1 - x^2) = sin(theta): (z - 1/z) / (2i)."""
    z = np.asarray(z, dtype=complex)
    return (z - 1 / z) / 2j


def gamma_factor(n: int, q: float) -> float:
    """(q^{n/2} - q^{-n/2}) / (q^{1/2} - q^{-1/2}), the scale of D_q on T_n."""
    q = check_base(q)
    return (q ** (n / 2) - q ** (-n / 2)) / (q**0.5 - q**-0.5)


def u_to_t(m: int) -> np.ndarray:
    """Chebyshev-T coefficients of U_m."""
    c = np.zeros(m + 1)
    for j in range(m, 0, -2):
        c[j] = 2.0
    if m % 2 == 0:
        c[0] = 1.0
    return c


def dq_exact(f: ChebSeries, q: float) -> ChebSeries:
    """Exact D_q f in the T basis, using D_q T_n = gamma_n U_{n-1}."""
    q = check_base(q)
    c = f.trim().coeffs
    n_top = c.size - 1
    if n_top > DEGREE_CAP:
        raise DomainError(f"degree {n_top} exceeds the cap {DEGREE_CAP}")
    if n_top < 1:
        return ChebSeries([0.0])
    out = np.zeros(n_top)
    for n in range(1, n_top + 1):
        if c[n]:
            out[:n] += c[n] * gamma_factor(n, q) * u_to_t(n - 1)
    return ChebSeries(out)


def _guard(z, eps, where="z"):
    d = np.abs(z - 1 / z)
    if np.any(d <= eps):
        bad = np.asarray(z).ravel()[np.argmin(np.asarray(d).ravel())]
        raise SingularityError(f"|{where} - 1/{where}| <= {eps:g} at {where}={bad!r}", point=bad)


def dq_pointwise(f, z, q: float, eps: float = SINGULARITY_EPS):
    """Apply D_q to a z-side function at the point(s) z."""
    q = check_base(q)
    fb = as_breve(f)
    z = np.asarray(z, dtype=complex)
    _guard(z, eps)
    s = math.sqrt(q)
    num = fb(s * z) - fb(z / s)
    return num / ((s - 1 / s) * (z - 1 / z) / 2)


def dq_iterated(f, z, q: float, order: int, eps: float = SINGULARITY_EPS):
    """Apply D_q ``order`` times at z.

    The function is sampled once on each lattice point z q^{j/2}, |j| <= order,
    with j of the same parity as order; each further level is a divided
    difference of the previous one.
    """
    q = check_base(q)
    if order < 0:
        raise DomainError("order must be nonnegative")
    fb = as_breve(f)
    z = np.asarray(z, dtype=complex)
    s = math.sqrt(q)
    js = range(-order, order + 1, 2)
    level = {j: fb(z * s**j) for j in js}
    for k in range(1, order + 1):
        span = order - k
        nxt = {}
        for j in range(-span, span + 1, 2):
            zj = z * s**j
            try:
                _guard(zj, eps, where=f"z q^({j}/2)")
            except SingularityError as err:
                raise SingularityError(f"{err} (lattice index {j}, level {k})", point=err.point) from None
            nxt[j] = (level[j + 1] - level[j - 1]) / ((s - 1 / s) * (zj - 1 / zj) / 2)
        level = nxt
    return level[0]


def theta_to_z(theta):
    return np.exp(1j * np.asarray(theta, dtype=float))


def x_to_z(x):
    """Map interior x in (-1, 1) to z = e^{i arccos x} on the upper unit semicircle."""
    return theta_to_z(np.arccos(np.asarray(x, dtype=float)))
