"""Interbasis expansion coefficients by quadrature and in closed form.

Inner products on the octant are computed on a tensor Gauss-Jacobi grid in
``(x, y)``.  The x rule carries the weight ``(1-x)^k2 (1+x)^k1`` and the y
rule ``(1-y)^(k1+k2+1) (1+y)^k3``; together with the Jacobian of the area
measure these are exactly the endpoint powers of ``Psi * Lambda``, so the
remaining integrand is a polynomial of degree at most ``2N`` per axis and
the rule is exact once ``order > N``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.special import roots_jacobi

from .errors import ParameterError, RacahlabError
from .report import CheckResult
from .specialfn import gamma_ratio
from .sphere import (
    Params3,
    lambda_prime,
    norm_lambda_prime_sq,
    norm_psi_prime_sq,
    psi_prime,
)
from .wilson import WilsonParams, phi_n

__all__ = [
    "QuadratureGrid",
    "QuadratureConvergenceError",
    "DEFAULT_ORDER",
    "default_grid_order",
    "build_grid",
    "inner_product",
    "coefficient_matrix",
    "expansion_coeff",
    "xi_quadrature",
    "xi_closed_form",
    "c_closed_form",
    "scale_constant_c",
    "verify_orthogonal_matrix",
    "resummation_residual",
    "coefficient_rows",
    "rows_to_csv",
    "rows_to_json",
]

DEFAULT_ORDER = 48
CSV_COLUMNS = ("N", "n", "q", "k1", "k2", "k3", "value")
ANCHOR_XI = "Solving all of these recurrences for Xi'"
ANCHOR_ORTH = "is orthogonal.  We have  identities"


class QuadratureConvergenceError(RacahlabError):
    """Doubling the grid order moved a result by more than the tolerance."""


def default_grid_order() -> int:
    """``RACAHLAB_GRID_ORDER`` if set, else 48."""
    raw = os.environ.get("RACAHLAB_GRID_ORDER")
    if raw is None:
        return DEFAULT_ORDER
    try:
        order = int(raw)
    except ValueError as exc:
        raise ParameterError(f"RACAHLAB_GRID_ORDER={raw!r} is not an integer") from exc
    if order < 8:
        raise ParameterError("grid order must be at least 8")
    return order


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor Gauss-Jacobi grid on the open square.

    ``weights`` are the raw product Gauss-Jacobi weights (all positive);
    ``measure_weights`` fold in the area-measure Jacobian divided by the
    absorbed endpoint profile, so that ``sum(measure_weights * f * g)``
    approximates the octant inner product of the actual functions.
    """

    k: Params3
    order: int
    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    measure_weights: np.ndarray
    exponent_profile: dict

    @property
    def nodes(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def beta_integral(self) -> float:
        """Exact ``int (1-x)^a (1+x)^b dx * int (1-y)^c (1+y)^d dy`` for the profile."""
        p = self.exponent_profile

        def one(a, b):
            return 2 ** (a + b + 1) * gamma_ratio([a + 1, b + 1], [a + b + 2])

        return one(p["1-x"], p["1+x"]) * one(p["1-y"], p["1+y"])

    def doubled(self) -> "QuadratureGrid":
        return build_grid(self.k, 2 * self.order)


def build_grid(k: Params3, order: int | None = None) -> QuadratureGrid:
    order = default_grid_order() if order is None else int(order)
    if order < 8:
        raise ParameterError("grid order must be at least 8")
    k1, k2, k3 = k.k
    prof = {"1-x": k2, "1+x": k1, "1-y": k1 + k2 + 1, "1+y": k3}
    if min(prof.values()) <= -1:
        raise ParameterError("endpoint exponent <= -1 is not integrable")
    xg, wx = roots_jacobi(order, prof["1-x"], prof["1+x"])
    yg, wy = roots_jacobi(order, prof["1-y"], prof["1+y"])
    X, Y = np.meshgrid(xg, yg, indexing="ij")
    W = np.outer(wx, wy)
    profile = (1 - X) ** prof["1-x"] * (1 + X) ** prof["1+x"] * (1 - Y) ** prof["1-y"] * (1 + Y) ** prof["1+y"]
    jac = 1.0 / (4 * math.sqrt(2) * np.sqrt(1 - X * X) * np.sqrt(1 + Y))
    return QuadratureGrid(k, order, X.ravel(), Y.ravel(), W.ravel(), (W * jac / profile).ravel(), prof)


def inner_product(f: Callable | np.ndarray, g: Callable | np.ndarray, grid: QuadratureGrid) -> float:
    """Octant inner product of two real functions of ``(x, y)`` (or their grid values)."""
    fv = f(grid.x, grid.y) if callable(f) else np.asarray(f)
    gv = g(grid.x, grid.y) if callable(g) else np.asarray(g)
    return float(np.dot(grid.measure_weights * fv, gv))


def _basis_values(N: int, k: Params3, grid: QuadratureGrid):
    P = np.array([psi_prime(N, n, k, grid.x, grid.y) for n in range(N + 1)])
    L = np.array([lambda_prime(N, q, k, grid.x, grid.y) for q in range(N + 1)])
    return P, L


def xi_quadrature(N: int, k: Params3, grid: QuadratureGrid | None = None) -> np.ndarray:
    """Matrix ``Xi'[n, q] = <Lambda'_{N-q,q}, Psi'_{N-n,n}>`` by quadrature."""
    if grid is None:
        grid = build_grid(k)
    if grid.k != k:
        raise ParameterError("grid was built for different parameters")
    P, L = _basis_values(N, k, grid)
    return (P * grid.measure_weights) @ L.T


def coefficient_matrix(N: int, k: Params3, grid: QuadratureGrid | None = None, check: bool = False, tol: float = 1e-8) -> np.ndarray:
    """``R'[n, q]``: coefficients of ``Lambda'_q = sum_n R'[n, q] Psi'_n``.

    Norms come from the closed form.  With ``check`` the computation is
    repeated at twice the grid order and :class:`QuadratureConvergenceError`
    is raised if any entry moves by more than ``tol`` (relative to the
    largest entry).
    """
    if grid is None:
        grid = build_grid(k)
    nrm = np.array([norm_psi_prime_sq(N, n, k) for n in range(N + 1)])
    R = xi_quadrature(N, k, grid) / nrm[:, None]
    if check:
        R2 = xi_quadrature(N, k, grid.doubled()) / nrm[:, None]
        moved = float(np.max(np.abs(R2 - R)) / max(np.max(np.abs(R2)), 1e-300))
        if moved > tol:
            raise QuadratureConvergenceError(f"order doubling moved coefficients by {moved:.2e}")
    return R


def expansion_coeff(N: int, n: int, q: int, k: Params3, grid: QuadratureGrid | None = None, check: bool = False) -> float:
    """``R'^n_q = <Lambda'_{N-q,q}, Psi'_{N-n,n}> / ||Psi'_{N-n,n}||^2``."""
    if not (0 <= n <= N and 0 <= q <= N):
        raise ParameterError(f"need 0 <= n, q <= N; got n={n}, q={q}, N={N}")
    if grid is None:
        grid = build_grid(k)
    val = inner_product(lambda_prime(N, q, k, grid.x, grid.y), psi_prime(N, n, k, grid.x, grid.y), grid)
    val /= norm_psi_prime_sq(N, n, k)
    if check:
        g2 = grid.doubled()
        v2 = inner_product(lambda_prime(N, q, k, g2.x, g2.y), psi_prime(N, n, k, g2.x, g2.y), g2)
        v2 /= norm_psi_prime_sq(N, n, k)
        if abs(v2 - val) > 1e-8 * max(abs(v2), 1e-300):
            raise QuadratureConvergenceError(f"order doubling moved R'={val} to {v2}")
    return val


def c_closed_form(k: Params3) -> float:
    """Scale constant fixed by the ``n = q = N = 0`` beta integrals: ``1 / (16 (k1+k2+k3+2)^2)``."""
    return 1.0 / (16 * (k.ksum + 2) ** 2)


def xi_closed_form(N: int, n: int, q: int, k: Params3, c: float | None = None, form: str = "corrected") -> float:
    """Closed-form ``Xi' = R'^n_q ||Psi'_{N-n,n}||^2``.

    ``form="corrected"`` (default) uses the prefactor

        (-1)^N 4c (K+2)^2 Gamma(N+1) / ((2N+K+2) Gamma(N+K+2) Gamma(k2+1)),

    ``K = k1+k2+k3``, which matches quadrature for every ``N``.
    ``form="displayed"`` uses ``4c (2N+K+2) Gamma(N+1) / (Gamma(N+K+2)
    Gamma(k2+1))``; the two agree at ``N = 0`` only.  Both multiply
    ``Phi_n(t)`` at ``t = q + (k2+k3+1)/2``.
    """
    if not (0 <= n <= N and 0 <= q <= N):
        raise ParameterError(f"need 0 <= n, q <= N; got n={n}, q={q}, N={N}")
    c = c_closed_form(k) if c is None else c
    K = k.ksum
    g = gamma_ratio([N + 1], [N + K + 2, k.k2 + 1])
    if form == "corrected":
        pre = (-1) ** N * 4 * c * (K + 2) ** 2 / (2 * N + K + 2) * g
    elif form == "displayed":
        pre = 4 * c * (2 * N + K + 2) * g
    else:
        raise ValueError(f"unknown form {form!r}")
    w = WilsonParams.from_k(k, N)
    return pre * phi_n(n, w, w.t(q))


def scale_constant_c(k: Params3, grid: QuadratureGrid | None = None, at: tuple[int, int, int] = (0, 0, 0), form: str = "corrected"):
    """Solve for ``c`` from the quadrature value of ``Xi'`` at ``(N, n, q)``.

    Returns ``(c, error_estimate)`` where the estimate is the change under
    grid-order doubling.
    """
    if grid is None:
        grid = build_grid(k)
    N, n, q = at
    unit = xi_closed_form(N, n, q, k, c=1.0, form=form)

    def solve(g):
        return float(xi_quadrature(N, k, g)[n, q]) / unit

    c1 = solve(grid)
    c2 = solve(grid.doubled())
    return c1, abs(c2 - c1)


def _norm_vectors(N: int, k: Params3):
    p = np.array([norm_psi_prime_sq(N, n, k) for n in range(N + 1)])
    lam = np.array([norm_lambda_prime_sq(N, q, k) for q in range(N + 1)])
    return p, lam


def verify_orthogonal_matrix(N: int, k: Params3, grid: QuadratureGrid | None = None, tol: float = 1e-8) -> CheckResult:
    """``O[n, q] = ||Psi'_n|| R'[n, q] / ||Lambda'_q||`` must be orthogonal.

    Also checks the two summation identities with norms:
    ``sum_l R'[n1,l] R'[n2,l] / ||Lambda'_l||^2 = delta / ||Psi'_n1||^2`` and
    ``sum_l ||Psi'_l||^2 R'[l,q1] R'[l,q2] = delta ||Lambda'_q1||^2``.
    """
    R = coefficient_matrix(N, k, grid)
    p, lam = _norm_vectors(N, k)
    O = np.sqrt(p)[:, None] * R / np.sqrt(lam)[None, :]
    I = np.eye(N + 1)
    res = {
        "O^T O - I": float(np.max(np.abs(O.T @ O - I))),
        "O O^T - I": float(np.max(np.abs(O @ O.T - I))),
        "rows": float(np.max(np.abs((R / lam) @ R.T * p[:, None] - I))),
        "columns": float(np.max(np.abs((R.T * p) @ R / lam[:, None] - I))),
    }
    return CheckResult.from_residual(f"orthogonal matrix N={N} k={k.k}", ANCHOR_ORTH, tol, max(res.values()), cases=res)


def resummation_residual(N: int, q: int, k: Params3, x, y, grid: QuadratureGrid | None = None) -> float:
    """``max |sum_n R'^n_q Psi'_n - Lambda'_q| / max |Lambda'_q|`` at the given points."""
    R = coefficient_matrix(N, k, grid)
    lhs = sum(R[n, q] * psi_prime(N, n, k, x, y) for n in range(N + 1))
    ref = lambda_prime(N, q, k, x, y)
    return float(np.max(np.abs(lhs - ref)) / np.max(np.abs(ref)))


def coefficient_rows(N: int, k: Params3, grid: QuadratureGrid | None = None, quantity: str = "xi") -> list[dict]:
    """Table rows ``N, n, q, k1, k2, k3, value`` plus closed-form comparison columns.

    ``quantity="xi"`` tabulates ``Xi'`` (quadrature); ``"R"`` tabulates ``R'``.
    """
    if grid is None:
        grid = build_grid(k)
    Xi = xi_quadrature(N, k, grid)
    p, _ = _norm_vectors(N, k)
    rows = []
    for n in range(N + 1):
        for q in range(N + 1):
            closed = xi_closed_form(N, n, q, k)
            value = float(Xi[n, q])
            rel = abs(value - closed) / max(abs(closed), 1e-300)
            if quantity == "R":
                value, closed = value / p[n], closed / p[n]
            elif quantity != "xi":
                raise ValueError(f"unknown quantity {quantity!r}")
            rows.append(
                {
                    "N": N, "n": n, "q": q, "k1": k.k1, "k2": k.k2, "k3": k.k3,
                    "value": float(value), "closed_form": float(closed), "rel_error": float(rel),
                }
            )
    return rows


def rows_to_csv(rows: Iterable[dict]) -> str:
    """CSV text with ``.`` decimals and ``repr`` float formatting (locale independent)."""
    rows = list(rows)
    extra = [c for c in (rows[0].keys() if rows else []) if c not in CSV_COLUMNS]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS) + extra, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({key: repr(float(v)) if isinstance(v, (float, np.floating)) else v for key, v in r.items()})
    return buf.getvalue()


def rows_to_json(rows: Iterable[dict]) -> str:
    return json.dumps(list(rows), indent=2, sort_keys=True)
