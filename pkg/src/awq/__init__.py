"""Askey-Wilson polynomials, the Askey-Wilson divided-difference operator and
numerical verification of their q-Sturm-Liouville identities."""

from .askey_wilson import AWParams, CANONICAL, aw_poly, eigenvalue_lambda, norm_xi, weight
from .chebpoly import ChebSeries, dq_exact, dq_pointwise
from .checks import CheckResult
from .quadrature import QuadratureRule

__all__ = [
    "AWParams",
    "CANONICAL",
    "ChebSeries",
    "CheckResult",
    "QuadratureRule",
    "aw_poly",
    "dq_exact",
    "dq_pointwise",
    "eigenvalue_lambda",
    "norm_xi",
    "weight",
]
__version__ = "0.1.0"
