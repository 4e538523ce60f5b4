"""Gauss-Chebyshev quadrature and the inner products built on it.

Every integral here has the form int F(x) dx / sqrt(1 - x^2) with F smooth
on [-1, 1]; the (1 - x^2)^{-1/2} factors of the weights and of the Chebyshev
inner product are absorbed into the rule, so no principal-value handling is
needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .askey_wilson import AWParams, aw_integral_closed, aw_poly, norm_xi, weight_sqrt_scaled
from .chebpoly import ChebSeries, dq_exact, dq_pointwise, eval_breve, sin_breve
from .checks import CheckResult, combine
from .errors import DomainError
from .qcore import check_base

__all__ = [
    "CheckResult",
    "QuadratureRule",
    "aw_integral_check",
    "dq_adjoint",
    "adjoint_residual",
    "gram_matrix",
    "gram_orthogonality",
    "green_residual",
    "ibp_residual",
    "inner_chebyshev",
    "inner_weighted",
    "values_at",
]


@dataclass(frozen=True)
class QuadratureRule:
    """N-point Gauss-Chebyshev rule of the first kind."""

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("a quadrature rule needs at least one node")

    @cached_property
    def _nodes_weights(self):
        x, w = npcheb.chebgauss(self.N)
        x.setflags(write=False)
        w.setflags(write=False)
        return x, w

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes_weights[0]

    @property
    def weights(self) -> np.ndarray:
        return self._nodes_weights[1]

    @cached_property
    def z(self) -> np.ndarray:
        """Nodes on the z side, e^{i theta_k} with theta_k = (2k - 1) pi / (2N)."""
        k = np.arange(1, self.N + 1)
        return np.exp(1j * (2 * k - 1) * np.pi / (2 * self.N))

    @cached_property
    def sin_theta(self) -> np.ndarray:
        return np.sqrt(1 - self.nodes**2)

    def integrate(self, values) -> complex | float:
        """sum_k w_k values_k, i.e. int values(x) dx / sqrt(1 - x^2)."""
        return self.weights @ np.asarray(values)

    def halved(self) -> "QuadratureRule":
        return QuadratureRule(max(1, self.N // 2))


def values_at(f, rule: QuadratureRule) -> np.ndarray:
    """Values of f at the rule's nodes.

    ``f`` is a ChebSeries, an array already sampled at the nodes, or a
    z-side callable (evaluated at e^{i theta_k}).
    """
    if isinstance(f, ChebSeries):
        return f(rule.nodes)
    if callable(f):
        return np.asarray(f(rule.z))
    if np.ndim(f) == 0:
        return np.full(rule.N, float(f))
    v = np.asarray(f)
    if v.shape != (rule.N,):
        raise DomainError(f"expected {rule.N} node values, got shape {v.shape}")
    return v


def _real_if_close(v, tol=1e-12):
    v = complex(v)
    return v.real if abs(v.imag) <= tol * max(1.0, abs(v.real)) else v


def inner_chebyshev(f, g, rule: QuadratureRule):
    """<f, g> = int f(x) conj(g(x)) dx / sqrt(1 - x^2)."""
    fv = values_at(f, rule)
    gv = values_at(g, rule)
    return _real_if_close(rule.integrate(fv * np.conj(gv)))


def inner_weighted(f, g, p: AWParams, rule: QuadratureRule):
    """(f, g)_w = int f g w(x; p) dx, with w sqrt(1 - x^2) folded into the rule."""
    ws = weight_sqrt_scaled(rule.nodes, p)
    fv = values_at(f, rule)
    gv = values_at(g, rule)
    return _real_if_close(rule.integrate(fv * np.conj(gv) * ws))


def aw_integral_check(p: AWParams, rule: QuadratureRule | None = None, tol: float = 1e-9) -> CheckResult:
    """Quadrature of int w dx against the closed product."""
    rule = rule or QuadratureRule(512)
    quad = inner_weighted(1.0, 1.0, p, rule)
    closed = aw_integral_closed(p)
    return CheckResult("aw_integral", "Eq. (3.13)", abs(quad - closed) / closed, tol,
                       {"quadrature": quad, "closed": closed, "nodes": rule.N, "params": p.params, "q": p.q})


def boundary_point(q: float) -> float:
    """(q^{1/2} + q^{-1/2}) / 2, where the boundary term evaluates f."""
    return (math.sqrt(q) + 1 / math.sqrt(q)) / 2


def _sin_dq_over_sin(g, z, q):
    # sqrt(1 - x^2) D_q( g (1 - x^2)^{-1/2} ) evaluated at z
    gb = g.breve if isinstance(g, ChebSeries) else g
    return sin_breve(z) * dq_pointwise(lambda u: gb(u) / sin_breve(u), z, q)


def dq_adjoint(g, z, q: float):
    """Formal adjoint D_q^* g = -sqrt(1 - x^2) D_q( g (1 - x^2)^{-1/2} ), at z."""
    return -_sin_dq_over_sin(g, z, q)


def ibp_residual(f: ChebSeries, g: ChebSeries, q: float, rule: QuadratureRule | None = None,
                 tol: float = 1e-10) -> CheckResult:
    """Integration by parts for D_q under the Chebyshev inner product.

    <D_q f, g> = pi sqrt(q) / (1 - q) [f(X) g(1) - f(-X) g(-1)]
                 - <f, sqrt(1 - x^2) D_q(g (1 - x^2)^{-1/2})>,   X = (q^{1/2} + q^{-1/2}) / 2
    """
    q = check_base(q)
    rule = rule or QuadratureRule(512)
    lhs = inner_chebyshev(dq_exact(f, q), g, rule)
    X = boundary_point(q)
    boundary = math.pi * math.sqrt(q) / (1 - q) * (f(X) * g(1.0) - f(-X) * g(-1.0))
    second = inner_chebyshev(f, _sin_dq_over_sin(g, rule.z, q), rule)
    rhs = boundary - second
    res = abs(lhs - rhs) / (1 + abs(lhs))
    return CheckResult("integration_by_parts", "Eq. (1.12)", float(res), tol,
                       {"lhs": lhs, "boundary": float(boundary), "adjoint_term": second,
                        "q": q, "nodes": rule.N})


def adjoint_residual(f: ChebSeries, g, q: float, rule: QuadratureRule | None = None,
                     tol: float = 1e-9) -> CheckResult:
    """<D_q f, g> = <f, D_q^* g> for g with g(+-1) = 0 (no boundary term)."""
    q = check_base(q)
    rule = rule or QuadratureRule(512)
    lhs = inner_chebyshev(dq_exact(f, q), g, rule)
    rhs = inner_chebyshev(f, dq_adjoint(g, rule.z, q), rule)
    res = abs(lhs - rhs) / (1 + abs(lhs))
    return CheckResult("formal_adjoint", "Eq. (1.13)", float(res), tol, {"lhs": lhs, "rhs": rhs})


def _dq_p_dq(f: ChebSeries, p_fn, q, z):
    # D_q( p * D_q f ) at z, inner D_q exact and outer pointwise
    df = dq_exact(f, q)
    return dq_pointwise(lambda u: p_fn(u) * eval_breve(df, u), z, q)


def green_residual(f: ChebSeries, g: ChebSeries, p_fn, q: float, rule: QuadratureRule | None = None,
                   tol: float = 1e-8) -> CheckResult:
    """Green's formula <D_q(p D_q f), sqrt(1-x^2) g> = <sqrt(1-x^2) f, D_q(p D_q g)>."""
    q = check_base(q)
    rule = rule or QuadratureRule(512)
    s = rule.sin_theta
    lhs = rule.integrate(_dq_p_dq(f, p_fn, q, rule.z) * s * g(rule.nodes))
    rhs = rule.integrate(s * f(rule.nodes) * _dq_p_dq(g, p_fn, q, rule.z))
    res = abs(lhs - rhs) / (1 + abs(lhs))
    return CheckResult("green_formula", "Eq. (3.1)", float(res), tol,
                       {"lhs": _real_if_close(lhs), "rhs": _real_if_close(rhs), "nodes": rule.N})


def gram_matrix(p: AWParams, nmax: int, rule: QuadratureRule) -> np.ndarray:
    """G[m, n] = (p_m, p_n)_w for m, n <= nmax."""
    ws = weight_sqrt_scaled(rule.nodes, p)
    V = np.array([aw_poly(n, p)(rule.nodes) for n in range(nmax + 1)])
    return (V * (rule.weights * ws)) @ V.T


def _gram_residuals(G, xi):
    d = np.sqrt(np.abs(np.diag(G)))
    off = np.abs(G) / np.outer(d, d)
    np.fill_diagonal(off, 0.0)
    return float(off.max()) if off.size > 1 else 0.0, float(np.max(np.abs(np.diag(G) - xi) / xi))


def gram_orthogonality(p: AWParams, nmax: int = 8, rule: QuadratureRule | None = None,
                       tol: float = 1e-9) -> CheckResult:
    """Normalized off-diagonal Gram entries and diagonal-versus-norm mismatch.

    The check is repeated on the rule with N/2 nodes; the change is reported
    as a convergence diagnostic.
    """
    rule = rule or QuadratureRule(512)
    p.require_weight_region()
    if rule.N < nmax + 1:
        raise DomainError("the rule must have more nodes than nmax")
    xi = np.array([norm_xi(n, p) for n in range(nmax + 1)])
    G = gram_matrix(p, nmax, rule)
    off, diag = _gram_residuals(G, xi)
    coarse = rule.halved()
    meta = {"off_diagonal": off, "diagonal": diag, "nodes": rule.N, "nmax": nmax}
    if coarse.N >= nmax + 1:
        off2, diag2 = _gram_residuals(gram_matrix(p, nmax, coarse), xi)
        meta["coarse_nodes"] = coarse.N
        meta["convergence_delta"] = abs(max(off, diag) - max(off2, diag2))
    parts = [
        CheckResult("orthogonality_offdiag", "Eq. (1.5)", off, tol),
        CheckResult("norms_diag", "Eq. (1.7)", diag, tol),
    ]
    return combine("orthogonality", "Eqs. (1.5), (1.7); Theorem 3.2", parts, tol, meta)
