"""The q-Sturm-Liouville operator of the Askey-Wilson family.

With w = w(x; p) and the inner coefficient p_inner = w(x; shift(p)) the
Askey-Wilson polynomials satisfy

    (1 / w) D_q( p_inner D_q p_n ) = lambda_n p_n,    lambda_n <= 0.

The positive operator is T f = -(1 / w) D_q( p_inner D_q f ), whose
eigenvalues are -lambda_n >= 0. Every check records the sign convention it
uses in ``meta["sign_convention"]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .askey_wilson import (
    AWParams,
    _list_add,
    aw_poly,
    default_grid,
    eigenvalue_lambda,
    norm_xi,
    pochhammer_basis,
    weight,
    weight_breve,
    weight_sqrt_scaled,
)
from .chebpoly import ChebSeries, cheb_mul_list, dq_exact, dq_pointwise, gamma_factor, sin_breve, x_to_z
from .checks import CheckResult, combine
from .errors import DomainError, ParameterRoleError
from .qcore import check_base, qpoch_multi
from .quadrature import QuadratureRule, inner_weighted

__all__ = [
    "AnsatzCoeffs",
    "SLConfig",
    "ansatz_solve",
    "apply_T",
    "chebyshev_case_check",
    "dirichlet_positivity",
    "dirichlet_energy",
    "eigenvalue_exact",
    "lambda_scan",
    "parseval_q_check",
    "q_inner",
    "q_orthonormal_basis",
    "rayleigh_quotient",
    "sl_eigen_residual",
    "symmetry_residual",
]

EIGEN_SIGN = "L p_n = lambda_n p_n with lambda_n <= 0"
T_SIGN = "T = -(1/w) D_q(p_inner D_q .), eigenvalues -lambda_n >= 0"


@dataclass(frozen=True)
class SLConfig:
    """Askey-Wilson parameters together with the two weights of the operator."""

    p: AWParams

    def __post_init__(self):
        self.p.require_weight_region()

    @property
    def q(self) -> float:
        return self.p.q

    @property
    def inner_params(self) -> AWParams:
        return self.p.shift()

    def w(self, x):
        return weight(x, self.p)

    def p_inner(self, x):
        return weight(x, self.inner_params)


def _grid(grid):
    return default_grid() if grid is None else np.asarray(grid, dtype=float)


def _outer(f: ChebSeries, cfg: SLConfig, z):
    # D_q( p_inner D_q f ) at z; the product is formed on the z side
    df = dq_exact(f, cfg.q)
    sp = cfg.inner_params
    return dq_pointwise(lambda u: weight_breve(u, sp) * df.breve(u), z, cfg.q)


def apply_T(f: ChebSeries, cfg: SLConfig, grid=None) -> np.ndarray:
    """(T f)(x) = -(1 / w(x)) D_q( p_inner D_q f )(x) at interior points x."""
    x = _grid(grid)
    z = x_to_z(x)
    return -np.real(_outer(f, cfg, z) / weight_breve(z, cfg.p))


def sl_eigen_residual(n: int, cfg: SLConfig, grid=None, tol: float = 1e-8) -> CheckResult:
    """max |(1/w) D_q(p_inner D_q p_n) - lambda_n p_n| / (1 + |lambda_n p_n|) on the grid."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    x = _grid(grid)
    pn = aw_poly(n, cfg.p)
    lam = eigenvalue_lambda(n, cfg.p)
    lhs = -apply_T(pn, cfg, x)
    rhs = lam * pn(x)
    res = float(np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))))
    return CheckResult(f"sl_eigen[n={n}]", "Eqs. (1.15)-(1.16)", res, tol,
                       {"lambda": lam, "nodes": int(x.size), "sign_convention": EIGEN_SIGN})


@dataclass(frozen=True)
class AnsatzCoeffs:
    """Coefficients a_0..a_K of f = sum_k a_k (a e^{i theta}, a e^{-i theta}; q)_k.

    ``terminated_at`` is the first n at which the step numerator
    lambda - lambda_n cancels to below ``threshold * (|lambda| + |lambda_n|)``,
    so that a_{n+1} is negligible against the size of its own ingredients, or
    None if the recursion never stalls. A scale-free test is needed because
    off-spectrum coefficients also decay, roughly like q^k. Solutions run
    in rational arithmetic keep the exact coefficients in ``exact``.
    """

    lam: float
    p: AWParams
    coeffs: np.ndarray
    terminated_at: int | None
    threshold: float
    exact: tuple | None = None

    @property
    def K(self) -> int:
        return self.coeffs.size - 1

    @property
    def terminated(self) -> bool:
        return self.terminated_at is not None

    def tail(self, n: int) -> float:
        """|a_{n+1}| / max_{k <= n} |a_k|."""
        return float(abs(self.coeffs[n + 1]) / np.max(np.abs(self.coeffs[: n + 1])))

    def as_series(self, upto: int | None = None) -> ChebSeries:
        """The (truncated) expansion as a polynomial in x.

        The sum alternates in sign and cancels heavily (about 12 digits at
        degree 8 for the canonical parameters), so exact solutions are summed
        in rational arithmetic and rounded once.
        """
        top = self.K if upto is None else upto
        if self.exact is not None:
            q, a = Fraction(self.p.q), Fraction(self.p.a)
            total = [Fraction(0)]
            basis = [Fraction(1)]
            for k in range(top + 1):
                if k:
                    basis = cheb_mul_list(basis, [1 + (a * q ** (k - 1)) ** 2, -2 * a * q ** (k - 1)])
                total = _list_add(total, [self.exact[k] * v for v in basis])
            return ChebSeries([float(v) for v in total])
        out = ChebSeries.constant(0.0)
        for k in range(top + 1):
            out = out + pochhammer_basis(self.p.a, self.p.q, k) * float(self.coeffs[k])
        return out


def _lambda(k, q, abcd):
    return 4 * q * (1 - q**-k) * (1 - abcd * q ** (k - 1)) / (1 - q) ** 2


def eigenvalue_exact(n: int, p: AWParams) -> Fraction:
    """lambda_n in rational arithmetic on the binary values of q and the parameters."""
    q = Fraction(p.q)
    return _lambda(n, q, math.prod(Fraction(u) for u in p.params))


def ansatz_step(k: int, lam, q, a, b, c, d):
    """a_{k+1} / a_k = (1 - q)^2 q^k (lambda - lambda_k) / (4 (1 - q^{k+1})(1 - ab q^k)(1 - ac q^k)(1 - ad q^k))."""
    den = 4 * (1 - q ** (k + 1)) * (1 - a * b * q**k) * (1 - a * c * q**k) * (1 - a * d * q**k)
    if den == 0:
        raise ParameterRoleError(f"degenerate parameters: the step denominator vanishes at k={k}")
    return (1 - q) ** 2 * q**k * (lam - _lambda(k, q, a * b * c * d)) / den


def ansatz_solve(lam, p: AWParams, K: int = 20, threshold: float = 1e-10,
                 exact: bool = False) -> AnsatzCoeffs:
    """Run the coefficient recursion of the polynomial ansatz from a_0 = 1 up to a_K.

    Parameters
    ----------
    lam : float or Fraction
        Trial eigenvalue in the convention L f = lam f.
    p : AWParams
        Parameters; ``a`` must be nonzero since it fixes the basis.
    K : int
        Last coefficient computed.
    threshold : float
        Relative cancellation in lambda - lambda_k that counts as termination.
    exact : bool
        Run in rational arithmetic; pair with ``eigenvalue_exact`` to hit an
        eigenvalue exactly.
    """
    if p.a == 0:
        raise ParameterRoleError("the ansatz basis needs a != 0")
    if K < 1:
        raise DomainError("K must be at least 1")
    conv = Fraction if exact else float
    vals = [conv(v) for v in (p.q, *p.params)]
    lam = conv(lam)
    a = [conv(1)]
    stop = None
    for k in range(K):
        a.append(a[k] * ansatz_step(k, lam, *vals))
        lam_k = _lambda(k, vals[0], math.prod(vals[1:]))
        if stop is None and abs(lam - lam_k) <= threshold * (abs(lam) + abs(lam_k)):
            stop = k
    return AnsatzCoeffs(float(lam), p, np.array([float(v) for v in a]), stop, threshold,
                        tuple(a) if exact else None)


def closed_ansatz_coeff(k: int, n: int, p: AWParams) -> float:
    """a_k at lambda = lambda_n: q^k (q^{-n}, abcd q^{n-1}; q)_k / (q, ab, ac, ad; q)_k."""
    q = p.q
    ab, ac, ad = p.a * p.b, p.a * p.c, p.a * p.d
    num = qpoch_multi([q**-n, p.abcd * q ** (n - 1)], q, k)
    return float(q**k * num / qpoch_multi([q, ab, ac, ad], q, k))


def ansatz_check(n: int, p: AWParams, K: int = 20, samples: int = 16, tol: float = 1e-9) -> CheckResult:
    """At lambda = lambda_n the ansatz terminates after a_n and is a multiple of p_n.

    Termination and the closed coefficients are checked on the floating
    recursion. The ratio test resums the expansion exactly, since its
    floating sum loses more digits than the tolerance allows.
    The multiple is (ab, ac, ad; q)_n / a^n; the spread of the sampled ratio
    and the deviation from the closed coefficients are both reported.
    """
    sol = ansatz_solve(eigenvalue_lambda(n, p), p, K)
    x = np.cos((np.arange(samples) + 0.5) * np.pi / samples)
    f = ansatz_solve(eigenvalue_exact(n, p), p, n + 1, exact=True).as_series(n)(x)
    pn = aw_poly(n, p)(x)
    const = float(qpoch_multi([p.a * p.b, p.a * p.c, p.a * p.d], p.q, n) / p.a**n)
    fit = float(np.dot(f, pn) / np.dot(f, f))
    spread = float(np.max(np.abs(fit * f - pn)) / np.max(np.abs(pn)))
    closed = np.array([closed_ansatz_coeff(k, n, p) for k in range(n + 1)])
    coeff_dev = float(np.max(np.abs(sol.coeffs[: n + 1] - closed)) / np.max(np.abs(closed)))
    parts = [
        CheckResult(f"ansatz_termination[n={n}]", "Eq. (3.17)", sol.tail(n) if n < K else 0.0, 1e-10),
        CheckResult(f"ansatz_ratio[n={n}]", "Theorem 3.4", spread, tol),
        CheckResult(f"ansatz_closed[n={n}]", "Eq. (3.18)", coeff_dev, tol),
    ]
    return combine(f"ansatz[n={n}]", "Theorem 3.4; Eqs. (3.14)-(3.18)", parts, tol,
                   {"terminated_at": sol.terminated_at, "ratio_fit": fit, "ratio_closed": const,
                    "sign_convention": EIGEN_SIGN})


def lambda_scan(p: AWParams, n_eigen: int = 6, total: int = 50, K: int = 20) -> list[tuple[float, int | None, int | None]]:
    """Trial values lambda_0..lambda_{n_eigen} plus off-spectrum values.

    Off-spectrum values are spread over [lambda_{n_eigen + 1}, 1], each kept at
    relative distance at least 1e-2 from every lambda_k, k <= K. Returns
    (lambda, eigen index or None, detected termination index or None).
    """
    spectrum = [eigenvalue_lambda(k, p) for k in range(K + 1)]
    trial = [(spectrum[n], n) for n in range(n_eigen + 1)]
    lo = spectrum[n_eigen + 1]
    need = total - len(trial)
    # oversample, then drop points close to the spectrum
    cand = np.linspace(lo, 1.0, 4 * need + 1)
    far = [v for v in cand
           if min(abs(v - s) / max(1.0, abs(s)) for s in spectrum) >= 1e-2]
    idx = np.linspace(0, len(far) - 1, need).round().astype(int)
    trial += [(float(far[i]), None) for i in idx]
    return [(lam, n, ansatz_solve(lam, p, K).terminated_at) for lam, n in trial]


def dichotomy_check(p: AWParams, n_eigen: int = 6, total: int = 50, K: int = 20) -> CheckResult:
    """Termination happens exactly at the eigenvalues in the scan."""
    scan = lambda_scan(p, n_eigen, total, K)
    wrong = [(lam, n, t) for lam, n, t in scan if t != n]
    return CheckResult("ansatz_dichotomy", "Theorem 3.4", float(len(wrong)), 0.5,
                       {"values": len(scan), "eigen": n_eigen + 1, "mismatches": wrong, "K": K})


def _apply_T_rule(f: ChebSeries, cfg: SLConfig, rule: QuadratureRule):
    return apply_T(f, cfg, rule.nodes)


def dirichlet_energy(f: ChebSeries, g: ChebSeries, cfg: SLConfig, rule: QuadratureRule) -> float:
    """int p_inner (D_q f)(D_q g) dx, with p_inner's 1/sqrt(1 - x^2) folded into the rule."""
    ws = weight_sqrt_scaled(rule.nodes, cfg.inner_params)
    dfv = dq_exact(f, cfg.q)(rule.nodes)
    dgv = dq_exact(g, cfg.q)(rule.nodes)
    return float(rule.integrate(ws * dfv * dgv))


def _t_inner(f: ChebSeries, g: ChebSeries, cfg: SLConfig, rule: QuadratureRule) -> float:
    return float(np.real(inner_weighted(_apply_T_rule(f, cfg, rule), g, cfg.p, rule)))


def dirichlet_positivity(f: ChebSeries, cfg: SLConfig, rule: QuadratureRule | None = None,
                         tol: float = 1e-8) -> CheckResult:
    """(T f, f)_w against int p_inner |D_q f|^2 dx; both must be nonnegative."""
    rule = rule or QuadratureRule(128)
    tf = _t_inner(f, f, cfg, rule)
    energy = dirichlet_energy(f, f, cfg, rule)
    diff = abs(tf - energy) / max(1.0, abs(energy))
    neg = max(0.0, -tf, -energy)
    parts = [
        CheckResult("dirichlet_form", "Eq. (5.9)", diff, tol),
        CheckResult("positivity", "Eq. (5.9)", neg, 1e-10),
    ]
    return combine("dirichlet_positivity", "Eq. (5.9)", parts, tol,
                   {"T_form": tf, "energy": energy, "sign_convention": T_SIGN})


def symmetry_residual(f: ChebSeries, g: ChebSeries, cfg: SLConfig, rule: QuadratureRule | None = None,
                      tol: float = 1e-8) -> CheckResult:
    """|(T f, g)_w - (f, T g)_w| / (1 + |(T f, g)_w|)."""
    rule = rule or QuadratureRule(128)
    a = _t_inner(f, g, cfg, rule)
    b = _t_inner(g, f, cfg, rule)
    return CheckResult("T_symmetry", "Lemma 5.2", abs(a - b) / (1 + abs(a)), tol,
                       {"Tf_g": a, "f_Tg": b, "sign_convention": T_SIGN})


def rayleigh_quotient(n: int, cfg: SLConfig, rule: QuadratureRule | None = None,
                      tol: float = 1e-8) -> CheckResult:
    """(T p_n, p_n)_w / (p_n, p_n)_w against -lambda_n."""
    rule = rule or QuadratureRule(128)
    pn = aw_poly(n, cfg.p)
    rq = _t_inner(pn, pn, cfg, rule) / float(np.real(inner_weighted(pn, pn, cfg.p, rule)))
    target = -eigenvalue_lambda(n, cfg.p)
    res = abs(rq - target) / max(1.0, abs(target))
    return CheckResult(f"rayleigh[n={n}]", "Eqs. (1.15)-(1.16)", res, tol,
                       {"quotient": rq, "minus_lambda": target, "sign_convention": T_SIGN})


def q_inner(f: ChebSeries, g: ChebSeries, cfg: SLConfig, rule: QuadratureRule | None = None) -> float:
    """(f, g)_Q = int p_inner (D_q f)(D_q g) dx + (f, g)_w."""
    rule = rule or QuadratureRule(128)
    return dirichlet_energy(f, g, cfg, rule) + float(np.real(inner_weighted(f, g, cfg.p, rule)))


def q_inner_form_check(f: ChebSeries, g: ChebSeries, cfg: SLConfig, rule: QuadratureRule | None = None,
                       tol: float = 1e-8) -> CheckResult:
    """(f, g)_Q against ([T + I] f, g)_w."""
    rule = rule or QuadratureRule(128)
    lhs = q_inner(f, g, cfg, rule)
    rhs = _t_inner(f, g, cfg, rule) + float(np.real(inner_weighted(f, g, cfg.p, rule)))
    return CheckResult("q_inner_form", "Eqs. (5.10)-(5.11)", abs(lhs - rhs) / max(1.0, abs(lhs)), tol,
                       {"Q": lhs, "T_plus_I": rhs, "sign_convention": T_SIGN})


def q_orthonormal_basis(cfg: SLConfig, nmax: int) -> list[ChebSeries]:
    """e_n = p_n / sqrt(xi_n (1 - lambda_n)), n <= nmax."""
    return [aw_poly(n, cfg.p) / math.sqrt(norm_xi(n, cfg.p) * (1 - eigenvalue_lambda(n, cfg.p)))
            for n in range(nmax + 1)]


def q_orthonormality_check(cfg: SLConfig, nmax: int = 6, rule: QuadratureRule | None = None,
                           tol: float = 1e-8) -> CheckResult:
    """max_{m,n} |(e_m, e_n)_Q - delta_{mn}|."""
    rule = rule or QuadratureRule(128)
    e = q_orthonormal_basis(cfg, nmax)
    G = np.array([[q_inner(em, en, cfg, rule) for en in e] for em in e])
    res = float(np.max(np.abs(G - np.eye(nmax + 1))))
    return CheckResult("q_orthonormality", "Eqs. (5.10)-(5.11)", res, tol,
                       {"nmax": nmax, "sign_convention": T_SIGN})


def parseval_q_check(f: ChebSeries, cfg: SLConfig, nmax: int, rule: QuadratureRule | None = None,
                     tol: float = 1e-8) -> CheckResult:
    """||f||_Q^2 against sum_{n <= nmax} (f, e_n)_Q^2 for polynomial f."""
    rule = rule or QuadratureRule(128)
    if f.degree > nmax:
        raise DomainError(f"deg f = {f.degree} exceeds nmax = {nmax}")
    norm2 = q_inner(f, f, cfg, rule)
    coeffs = [q_inner(f, e, cfg, rule) for e in q_orthonormal_basis(cfg, nmax)]
    total = float(np.sum(np.square(coeffs)))
    return CheckResult("parseval_q", "Eq. (5.15)", abs(norm2 - total) / max(1.0, norm2), tol,
                       {"norm_Q": norm2, "sum": total, "nmax": nmax})


def chebyshev_case_check(n: int, q: float, grid=None, tol: float = 1e-10) -> CheckResult:
    """sqrt(1-x^2) D_q( sqrt(1-x^2) D_q T_n ) + gamma_n^2 T_n on an interior grid.

    The residual is scaled by 1 + gamma_n^2.
    """
    q = check_base(q)
    if n < 0:
        raise DomainError("n must be nonnegative")
    x = _grid(grid)
    z = x_to_z(x)
    dt = dq_exact(ChebSeries.basis(n), q)
    inner = dq_pointwise(lambda u: sin_breve(u) * dt.breve(u), z, q)
    lhs = np.real(sin_breve(z) * inner)
    g2 = gamma_factor(n, q) ** 2
    tn = np.cos(n * np.arccos(x))
    res = float(np.max(np.abs(lhs + g2 * tn)) / (1 + g2))
    return CheckResult(f"chebyshev_case[n={n},q={q:g}]", "Eq. (5.18)", res, tol,
                       {"gamma_sq": g2, "nodes": int(x.size)})


def sample_polys(rng: np.random.Generator, count: int, max_degree: int) -> Sequence[ChebSeries]:
    """Random ChebSeries with normal coefficients and degrees in [1, max_degree]."""
    return [ChebSeries(rng.standard_normal(rng.integers(1, max_degree + 1) + 1)) for _ in range(count)]
