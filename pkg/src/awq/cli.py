"""Command-line driver: runs the verification suite and writes reports and tables.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for an
invalid configuration or an unwritable output path.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import askey_wilson as aw
from . import connection as cn
from . import qcore
from . import quadrature as qd
from . import sturm_liouville as sl
from .askey_wilson import AWParams, CANONICAL
from .checks import CheckResult
from .errors import AWQError, InvalidInputError

SEED = 20240607


@dataclass(frozen=True)
class SuiteConfig:
    """Settings of one verification run."""

    params: AWParams = CANONICAL
    nmax: int = 8
    nodes: int = 512
    tol: dict = field(default_factory=dict)
    fmt: str = "json"
    only: tuple = ()
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.nmax < 0:
            raise InvalidInputError("nmax must be nonnegative")
        if self.nodes < 2 * self.nmax + 2:
            raise InvalidInputError(f"nodes must be at least 2*nmax + 2 = {2 * self.nmax + 2}")
        if self.fmt not in ("json", "csv", "text"):
            raise InvalidInputError(f"unknown format {self.fmt!r}")
        unknown = set(self.only) - set(FAMILIES)
        if unknown:
            raise InvalidInputError(f"unknown check ids: {sorted(unknown)}")
        unknown = set(self.tol) - set(FAMILIES) - {"*"}
        if unknown:
            raise InvalidInputError(f"tolerance override for unknown check ids: {sorted(unknown)}")
        if self.jobs < 1:
            raise InvalidInputError("jobs must be positive")

    def echo(self) -> dict:
        p = self.params
        return {"q": p.q, "a": p.a, "b": p.b, "c": p.c, "d": p.d, "nmax": self.nmax,
                "nodes": self.nodes, "tol": dict(self.tol), "only": list(self.only)}

    def tol_for(self, family: str, default: float) -> float:
        return float(self.tol.get(family, self.tol.get("*", default)))


@dataclass
class Report:
    config: dict
    checks: list
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"config": self.config, "checks": [c.to_dict() for c in self.checks], "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        return cls(data["config"], [CheckResult.from_dict(c) for c in data["checks"]])

    def to_text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _rng():
    return np.random.default_rng(SEED)


def _q_series(cfg):
    q = cfg.params.q
    t = cfg.tol_for("q_series", 1e-11)
    return [qcore.check_q_binomial(0.3, 0.5, q, tol=t),
            qcore.check_1psi1(-0.8, 0.2, 0.5, q, tol=t),
            qcore.check_triple_product(-0.7 + 0.2j, q, tol=t)]


def _construction(cfg):
    p = cfg.params
    top = cfg.nmax + 4
    return ([aw.recurrence_check(n, p, cfg.tol_for("construction", 1e-12)) for n in range(top + 1)]
            + [aw.dual_construction_check(n, p, cfg.tol_for("construction", 1e-11)) for n in range(top + 1)])


def _lowering(cfg):
    return [aw.lowering_check(n, cfg.params, cfg.tol_for("lowering", 1e-11)) for n in range(1, cfg.nmax + 3)]


def _raising(cfg):
    return [aw.raising_check(n, cfg.params, tol=cfg.tol_for("raising", 1e-8))
            for n in range(1, min(cfg.nmax, 6) + 1)]


def _weight_ratio(cfg):
    return [aw.weight_ratio_check(cfg.params, aw.default_grid(64), cfg.tol_for("weight_ratio", 1e-8))]


def _rodrigues(cfg):
    return [aw.rodrigues_check(n, cfg.params, aw.default_grid(64), cfg.tol_for("rodrigues", 1e-7))
            for n in range(min(cfg.nmax, 4) + 1)]


def _aw_integral(cfg):
    t = cfg.tol_for("aw_integral", 1e-9)
    rule = qd.QuadratureRule(cfg.nodes)
    return [qd.aw_integral_check(cfg.params, rule, t),
            aw.xi_functional_check(cfg.params, 3, max(t, 1e-11)),
            aw.xi_limit_check(cfg.params, tol=max(t, 1e-10))]


def _orthogonality(cfg):
    return [qd.gram_orthogonality(cfg.params, cfg.nmax, qd.QuadratureRule(cfg.nodes),
                                  cfg.tol_for("orthogonality", 1e-9))]


def _ibp(cfg):
    rng = _rng()
    rule = qd.QuadratureRule(cfg.nodes)
    t = cfg.tol_for("integration_by_parts", 1e-10)
    out = []
    for _ in range(10):
        f, g = sl.sample_polys(rng, 2, 10)
        out.append(qd.ibp_residual(f, g, cfg.params.q, rule, t))
    return out


def _green(cfg):
    rng = _rng()
    p = cfg.params
    sp = p.shift()
    f, g = sl.sample_polys(rng, 2, cfg.nmax)
    return [qd.green_residual(f, g, lambda u: aw.weight_breve(u, sp), p.q, qd.QuadratureRule(cfg.nodes),
                              cfg.tol_for("green", 1e-8))]


def _sl_cfg(cfg):
    return sl.SLConfig(cfg.params)


def _sl_eigen(cfg):
    c = _sl_cfg(cfg)
    return [sl.sl_eigen_residual(n, c, aw.default_grid(64), cfg.tol_for("sl_eigen", 1e-8))
            for n in range(cfg.nmax + 1)]


def _rayleigh(cfg):
    c = _sl_cfg(cfg)
    rule = qd.QuadratureRule(min(cfg.nodes, 128))
    return [sl.rayleigh_quotient(n, c, rule, cfg.tol_for("rayleigh", 1e-8)) for n in range(cfg.nmax + 1)]


def _ansatz(cfg):
    return [sl.ansatz_check(n, cfg.params, tol=cfg.tol_for("ansatz", 1e-9)) for n in range(cfg.nmax + 1)]


def _dichotomy(cfg):
    return [sl.dichotomy_check(cfg.params, n_eigen=min(6, cfg.nmax))]


def _operator(cfg):
    c = _sl_cfg(cfg)
    rule = qd.QuadratureRule(min(cfg.nodes, 128))
    t = cfg.tol_for("operator", 1e-8)
    fs = sl.sample_polys(_rng(), 6, cfg.nmax)
    out = [sl.symmetry_residual(f, g, c, rule, t) for f, g in zip(fs, fs[1:])]
    out += [sl.dirichlet_positivity(f, c, rule, t) for f in fs]
    out.append(sl.q_inner_form_check(fs[0], fs[1], c, rule, t))
    out.append(sl.q_orthonormality_check(c, min(cfg.nmax, 6), rule, t))
    out.append(sl.parseval_q_check(fs[2], c, cfg.nmax, rule, t))
    return out


def _chebyshev_case(cfg):
    t = cfg.tol_for("chebyshev_case", 1e-10)
    return [sl.chebyshev_case_check(n, cfg.params.q, aw.default_grid(64), t) for n in range(11)]


def _connection(cfg):
    p = cfg.params
    return [cn.connection_check(cfg.nmax, p.a, p.b, p.q, qd.QuadratureRule(min(cfg.nodes, 128)),
                                cfg.tol_for("connection", 1e-9))]


#: check families in dependency order
FAMILIES: dict[str, Callable[[SuiteConfig], list]] = {
    "q_series": _q_series,
    "construction": _construction,
    "lowering": _lowering,
    "raising": _raising,
    "weight_ratio": _weight_ratio,
    "rodrigues": _rodrigues,
    "aw_integral": _aw_integral,
    "orthogonality": _orthogonality,
    "integration_by_parts": _ibp,
    "green": _green,
    "sl_eigen": _sl_eigen,
    "rayleigh": _rayleigh,
    "ansatz": _ansatz,
    "dichotomy": _dichotomy,
    "operator": _operator,
    "chebyshev_case": _chebyshev_case,
    "connection": _connection,
}


def _run_family(name: str, cfg: SuiteConfig) -> tuple[list, float]:
    start = time.perf_counter()
    try:
        results = FAMILIES[name](cfg)
    except AWQError as err:
        # a family that cannot run is reported as a failed check
        results = [CheckResult(name, "n/a", math.inf, 1.0, {"error": f"{type(err).__name__}: {err}"})]
    return results, time.perf_counter() - start


def run_verify(cfg: SuiteConfig) -> Report:
    """Run the selected check families and collect a Report."""
    names = [n for n in FAMILIES if not cfg.only or n in cfg.only]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            outcomes = list(pool.map(lambda n: _run_family(n, cfg), names))
    else:
        outcomes = [_run_family(n, cfg) for n in names]
    checks, timings = [], {}
    for name, (results, secs) in zip(names, outcomes):
        checks.extend(results)
        timings[name] = secs
    return Report(cfg.echo(), checks, timings)


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _write_rows(path: Path, rows, header=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        w.writerows(rows)


def emit_tables(cfg: SuiteConfig, outdir) -> list[Path]:
    """Write coefficient, recurrence, lambda, xi, Gram and connection CSVs to ``outdir``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    p = cfg.params
    written = []
    for n in range(cfg.nmax + 1):
        path = out / f"coefficients_n{n}.csv"
        _write_rows(path, [(k, _fmt(c)) for k, c in enumerate(aw.aw_poly(n, p).coeffs)])
        written.append(path)
    tables = {
        "recurrence.csv": (["n", "A", "B", "C"],
                           [(n, *map(_fmt, (r.A, r.B, r.C)))
                            for n in range(cfg.nmax + 1) for r in [aw.recurrence_coeffs(n, p)]]),
        "lambda.csv": (["n", "lambda"], [(n, _fmt(aw.eigenvalue_lambda(n, p))) for n in range(cfg.nmax + 1)]),
        "xi.csv": (["n", "xi"], [(n, _fmt(aw.norm_xi(n, p))) for n in range(cfg.nmax + 1)]),
        "gram.csv": (None, [[_fmt(v) for v in row]
                            for row in qd.gram_matrix(p, cfg.nmax, qd.QuadratureRule(cfg.nodes))]),
    }
    rows = []
    rule = qd.QuadratureRule(min(cfg.nodes, 128))
    for n in range(cfg.nmax + 1):
        tab = cn.connection_oracle(n, p.a, p.b, p.q, rule)
        for j in range(n + 1):
            closed = cn.connection_closed(n, j, p.a, p.b, p.q)
            res = max(abs(closed - tab.c[j]), abs(closed - tab.c_solve[j])) / max(1.0, abs(closed))
            rows.append((n, j, *map(_fmt, (closed, tab.c[j], tab.c_solve[j], res))))
    tables["connection.csv"] = (["n", "j", "closed", "oracle_quadrature", "oracle_solve", "residual"], rows)
    for name, (header, body) in tables.items():
        _write_rows(out / name, body, header)
        written.append(out / name)
    return written


def _report_csv(report: Report, path: Path):
    rows = [(c.id, c.paper_ref, _fmt(c.residual), _fmt(c.tolerance), c.passed) for c in report.checks]
    _write_rows(path, rows, ["id", "paper_ref", "residual", "tolerance", "pass"])


def _parse_tol(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.rpartition("=")
        out[key if sep else "*"] = float(val)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="awq", description="Verify Askey-Wilson and q-Sturm-Liouville identities.")
    d = CANONICAL
    ap.add_argument("--q", type=float, default=d.q)
    ap.add_argument("--a", type=float, default=d.a)
    ap.add_argument("--b", type=float, default=d.b)
    ap.add_argument("--c", type=float, default=d.c)
    ap.add_argument("--d", type=float, default=d.d)
    ap.add_argument("--nmax", type=int, default=8)
    ap.add_argument("--nodes", type=int, default=512)
    ap.add_argument("--tol", action="append", metavar="[ID=]VALUE",
                    help="tolerance override, for one check family or (bare value) for all")
    ap.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="json")
    ap.add_argument("--only", action="append", metavar="ID", help=f"run only these families: {', '.join(FAMILIES)}")
    ap.add_argument("--out", help="report file (json/text) or output directory (csv, with tables)")
    ap.add_argument("--jobs", type=int, default=1, help="worker threads")
    return ap


def config_from_args(ns) -> SuiteConfig:
    params = AWParams(ns.q, ns.a, ns.b, ns.c, ns.d)
    only = tuple(x for item in ns.only or () for x in item.split(",") if x)
    return SuiteConfig(params, ns.nmax, ns.nodes, _parse_tol(ns.tol), ns.fmt, only, ns.out, ns.jobs)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        cfg.params.require_weight_region()
    except (AWQError, ValueError) as err:
        print(f"awq: invalid configuration: {err}", file=sys.stderr)
        return 2
    report = run_verify(cfg)
    try:
        if cfg.fmt == "csv":
            if not cfg.out:
                raise OSError("csv output needs --out DIR")
            outdir = Path(cfg.out)
            outdir.mkdir(parents=True, exist_ok=True)
            _report_csv(report, outdir / "report.csv")
            emit_tables(cfg, outdir)
        else:
            text = report.to_json() if cfg.fmt == "json" else report.to_text()
            if cfg.out:
                Path(cfg.out).write_text(text + "\n")
            else:
                print(text)
    except OSError as err:
        print(f"awq: cannot write output: {err}", file=sys.stderr)
        return 2
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
