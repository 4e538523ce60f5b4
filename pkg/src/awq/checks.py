"""Result records produced by identity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one numerical identity check.

    ``passed`` is derived from ``residual <= tolerance`` and cannot be set
    independently. A NaN residual never passes.
    """

    id: str
    paper_ref: str
    residual: float
    tolerance: float
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance) and not math.isnan(self.residual)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "paper_ref": self.paper_ref,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "meta": _jsonable(self.meta),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CheckResult":
        return cls(
            id=data["id"],
            paper_ref=data["paper_ref"],
            residual=float(data["residual"]),
            tolerance=float(data["tolerance"]),
            meta=dict(data.get("meta", {})),
        )

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.id:<28} residual={self.residual:.3e} tol={self.tolerance:.1e}"


def combine(id: str, paper_ref: str, parts: list[CheckResult], tolerance: float | None = None,
            meta: dict[str, Any] | None = None) -> CheckResult:
    """Merge sub-checks into one result whose residual is the worst normalized part.

    Each part's residual is rescaled by its own tolerance so that parts on
    different tolerance rungs can be combined; the merged result then passes
    iff every part passes.
    """
    if not parts:
        raise ValueError("nothing to combine")
    if tolerance is None:
        tolerance = min(p.tolerance for p in parts)
    worst = max(p.residual / p.tolerance for p in parts)
    m = {"parts": [p.to_dict() for p in parts]}
    if meta:
        m.update(meta)
    return CheckResult(id, paper_ref, worst * tolerance, tolerance, m)


def _jsonable(value):
    # numpy scalars/arrays and complex values are flattened for the JSON report
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, "tolist"):
        return _jsonable(value.tolist())
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value
