"""Command-line entry point ``racahlab``.

Exit status is 0 when every check passes, 1 when any fails and 2 on a
configuration error.  Random panels come from
``numpy.random.default_rng([seed, criterion])`` (PCG64), see
:mod:`racahlab.suite`.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import suite
from .errors import RacahlabError
from .expansion import build_grid, coefficient_rows, rows_to_csv, rows_to_json, verify_orthogonal_matrix, xi_closed_form
from .quadalg import verify_casimir, verify_closure, verify_self_adjoint, verify_spectrum
from .report import CheckResult
from .sphere import Params3
from .wilson import (
    WilsonParams,
    all_permutations,
    eigen_residual,
    mu_shift_identities,
    orthogonality_defect,
    permutation_covariant,
    phi_n,
    racah_gram,
)
from .wilsonfn import (
    in_convergence_window,
    phi_residual,
    psi_residual,
    wilson_3term_residual,
    wilson_eigen_residual,
    wilson_function,
    wilson_murec_residual,
)

SCHEMA_VERSION = 1
COMMANDS = ("eval", "verify-algebra", "verify-orthogonality", "expand", "wilson", "wilsonfn", "report-all")
CHECK_CSV_COLUMNS = ("name", "status", "residual", "tolerance", "anchor")


class ConfigError(RacahlabError, ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    k: Params3 | None = None
    abgd: WilsonParams | None = None
    N: int | None = None
    n: float | None = None
    q: int | None = None
    t: float | None = None
    wilson: bool = False
    grid_order: int | None = None
    seed: int = suite.DEFAULT_SEED
    output: str | None = None
    format: str = "text"
    extra: dict = field(default_factory=dict)


def _floats(text: str, count: int, flag: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"{flag} expects {count} comma-separated numbers, got {text!r}") from None
    if len(vals) != count or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{flag} expects {count} finite comma-separated numbers, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="racahlab", description="Racah/Wilson polynomial verification on the 2-sphere")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--N", type=int, help="energy level")
    p.add_argument("--k", help="k1,k2,k3")
    p.add_argument("--abgd", help="alpha,beta,gamma,delta")
    p.add_argument("--t", type=float, help="spectral variable")
    p.add_argument("--n", type=float, help="degree (non-integer allowed for wilsonfn)")
    p.add_argument("--q", type=int, help="lattice index")
    p.add_argument("--wilson", action="store_true", help="eval: evaluate Phi_n instead of Xi'")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--output", help="write the report here (UTF-8) instead of stdout")
    p.add_argument("--seed", type=int, default=suite.DEFAULT_SEED)
    p.add_argument("--grid-order", type=int, dest="grid_order")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command, N=ns.N, n=ns.n, q=ns.q, t=ns.t, wilson=ns.wilson,
        grid_order=ns.grid_order, seed=ns.seed, output=ns.output, format=ns.format,
    )
    if ns.k is not None:
        cfg.k = Params3(*_floats(ns.k, 3, "--k"))
    if ns.abgd is not None:
        cfg.abgd = WilsonParams(*_floats(ns.abgd, 4, "--abgd"))
    if cfg.N is not None and cfg.N < 0:
        raise ConfigError("--N must be nonnegative")
    if cfg.grid_order is not None and cfg.grid_order < 4:
        raise ConfigError("--grid-order must be at least 4")
    if cfg.t is not None and cfg.t == 0.0 and cfg.command in ("wilson", "wilsonfn"):
        raise ConfigError("--t must be nonzero for difference operators")
    return cfg


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise ConfigError(f"{cfg.command} needs {', '.join(missing)}")


def _int_degree(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.n != int(cfg.n) or cfg.n < 0:
        raise ConfigError("--n must be a nonnegative integer here")
    return int(cfg.n)


# -- commands ---------------------------------------------------------------------


def cmd_eval(cfg: RunConfig) -> dict:
    if cfg.wilson:
        _require(cfg, "abgd", "n", "t")
        if cfg.n == int(cfg.n) and cfg.n >= 0:
            value = phi_n(int(cfg.n), cfg.abgd, cfg.t)
        else:
            value = wilson_function(cfg.n, cfg.abgd, cfg.t)
        return {"values": [{"quantity": "Phi_n", "n": cfg.n, "t": cfg.t, "abgd": cfg.abgd.as_tuple(), "value": value}]}
    _require(cfg, "k", "N", "n", "q")
    n = _int_degree(cfg)
    if not (0 <= n <= cfg.N and 0 <= cfg.q <= cfg.N):
        raise ConfigError("need 0 <= n, q <= N")
    value = xi_closed_form(cfg.N, n, cfg.q, cfg.k)
    return {"values": [{"quantity": "Xi'", "N": cfg.N, "n": n, "q": cfg.q, "k": cfg.k.k, "value": value}]}


def cmd_verify_algebra(cfg: RunConfig) -> dict:
    if cfg.k is None:
        return {"checks": [suite.criterion_1(cfg.seed), suite.criterion_2(cfg.seed)]}
    N = 4 if cfg.N is None else cfg.N
    return {
        "checks": [
            verify_closure(N, cfg.k),
            verify_casimir(N, cfg.k),
            verify_spectrum(N, cfg.k),
            verify_self_adjoint(N, cfg.k),
        ]
    }


def cmd_verify_orthogonality(cfg: RunConfig) -> dict:
    if cfg.k is None:
        return {"checks": [suite.criterion_3(cfg.seed, cfg.grid_order), suite.criterion_4(cfg.seed)]}
    N = 4 if cfg.N is None else cfg.N
    grid = build_grid(cfg.k, cfg.grid_order)
    w = WilsonParams.from_k(cfg.k, N)
    racah = CheckResult.from_residual(
        f"racah gram N={N} k={cfg.k.k}", "precisely the measure for orthogonality", 1e-9,
        orthogonality_defect(racah_gram(w, N, N)),
    )
    return {"checks": [verify_orthogonal_matrix(N, cfg.k, grid), racah]}


def cmd_expand(cfg: RunConfig) -> dict:
    _require(cfg, "k", "N")
    rows = coefficient_rows(cfg.N, cfg.k, build_grid(cfg.k, cfg.grid_order))
    worst = max(r["rel_error"] for r in rows)
    check = CheckResult.from_residual(
        f"xi closed form N={cfg.N} k={cfg.k.k}", "Solving all of these recurrences for Xi'", 1e-6, worst
    )
    return {"rows": rows, "checks": [check]}


def cmd_wilson(cfg: RunConfig) -> dict:
    if cfg.abgd is None:
        return {"checks": [suite.criterion_5(cfg.seed), suite.criterion_7(cfg.seed), suite.criterion_9(cfg.seed)]}
    w = cfg.abgd
    nmax = 6 if cfg.n is None else _int_degree(cfg)
    ts = [cfg.t] if cfg.t is not None else list(suite.panel_rng(cfg.seed, 0).uniform(0.1, 3.0, 3))
    eig = perm = mu = 0.0
    for t in ts:
        for n in range(nmax + 1):
            eig = max(eig, abs(eigen_residual(n, w, t)))
            vals = np.array([permutation_covariant(n, w, t, p) for p in all_permutations()])
            perm = max(perm, float(np.ptp(vals) / max(np.max(np.abs(vals)), 1.0)))
            mu = max(mu, *mu_shift_identities(n, w, t).values())
    tag = f"abgd={w.as_tuple()}"
    return {
        "checks": [
            CheckResult.from_residual(f"eigenvalue {tag}", "a 2nd order difference equation for $\\Xi'$", 1e-10, eig),
            CheckResult.from_residual(f"permutation {tag}", "is invariant under all permutations", 1e-10, perm),
            CheckResult.from_residual(f"mu relations {tag}", "$(\\alpha+\\beta)\\Phi_n$", 1e-10, mu),
        ]
    }


def cmd_wilsonfn(cfg: RunConfig) -> dict:
    if cfg.abgd is None:
        return {"checks": [suite.criterion_8(cfg.seed)]}
    _require(cfg, "n", "t")
    w, n, t = cfg.abgd, cfg.n, cfg.t
    if not in_convergence_window(w):
        raise ConfigError(f"{w.as_tuple()} is outside the convergence window")
    tag = f"n={n} t={t} abgd={w.as_tuple()}"
    checks = [
        CheckResult.from_residual(f"phi residual {tag}", "making use of the Stirling formula", 1e-6, abs(phi_residual(n, w, t))),
        CheckResult.from_residual(f"psi residual {tag}", "doesn't satisfy the eigenvalue equation", 1e-6, abs(psi_residual(n, w, t))),
        CheckResult.from_residual(f"eigenvalue {tag}", "do satisfy the eigenvalue equation", 1e-7, wilson_eigen_residual(n, w, t)),
        CheckResult.from_residual(f"3-term {tag}", "must also satisfy the 3-term recurrence formula", 1e-6, wilson_3term_residual(n, w, t)),
    ]
    if in_convergence_window(w.shifted(0.5, 0.5, -0.5, -0.5)):
        checks.append(
            CheckResult.from_residual(f"murec {tag}", "satisfies all of the recurrence formulas", 1e-7, wilson_murec_residual(n, w, t))
        )
    return {"checks": checks, "values": [{"quantity": "~Phi_n", "n": n, "t": t, "value": wilson_function(n, w, t)}]}


def cmd_report_all(cfg: RunConfig) -> dict:
    return {"checks": suite.run_all(cfg.seed, cfg.grid_order)}


HANDLERS = {
    "eval": cmd_eval,
    "verify-algebra": cmd_verify_algebra,
    "verify-orthogonality": cmd_verify_orthogonality,
    "expand": cmd_expand,
    "wilson": cmd_wilson,
    "wilsonfn": cmd_wilsonfn,
    "report-all": cmd_report_all,
}


# -- output --------------------------------------------------------------------------


def _plain(obj):
    """Recursively convert numpy scalars and tuples for JSON."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _check_entry(c: CheckResult) -> dict:
    return {
        "name": c.name,
        "anchor": c.anchor,
        "tolerance": c.tolerance,
        "residual": c.residual,
        "status": c.status,
        "details": c.details,
    }


def build_report(cfg: RunConfig, result: dict, started: str, finished: str) -> dict:
    """Report body (deterministic for a given config) plus a ``metadata`` block with timings."""
    checks = sorted(result.get("checks", []), key=lambda c: c.name)
    body = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "passed": all(c.passed for c in checks),
        "checks": [_check_entry(c) for c in checks],
    }
    for key in ("values", "rows"):
        if key in result:
            body[key] = result[key]
    body["metadata"] = {
        "started": started,
        "finished": finished,
        "wall_time": {c.name: c.wall_time for c in checks},
    }
    return _plain(body)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if "rows" in report:
            return rows_to_csv(report["rows"])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if "values" in report and not report["checks"]:
            w.writerow(["quantity", "value"])
            for v in report["values"]:
                w.writerow([v["quantity"], repr(float(v["value"]))])
            return buf.getvalue()
        w.writerow(CHECK_CSV_COLUMNS)
        for c in report["checks"]:
            w.writerow([c["name"], c["status"], repr(float(c["residual"])), repr(float(c["tolerance"])), c["anchor"]])
        return buf.getvalue()
    lines = []
    for v in report.get("values", []):
        lines.append(repr(float(v["value"])))
    if "rows" in report:
        lines.append(rows_to_csv(report["rows"]).rstrip("\n"))
    for c in report["checks"]:
        lines.append(f"{c['status']} {c['name']}: residual={c['residual']:.3e} tol={c['tolerance']:.1e}")
    return "\n".join(lines) + "\n"


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def run(cfg: RunConfig) -> tuple[int, str]:
    started = _now()
    result = HANDLERS[cfg.command](cfg)
    report = build_report(cfg, result, started, _now())
    return (0 if report["passed"] else 1), render(report, cfg.format)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        status, text = run(cfg)
    except (RacahlabError, ValueError) as exc:
        print(f"racahlab: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
