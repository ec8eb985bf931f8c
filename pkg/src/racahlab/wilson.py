"""Racah and Wilson polynomials, their weight, and the difference operators.

Parameters ``(alpha, beta, gamma, delta)`` enter through

    Phi_n(t) = 4F3(-n, n+alpha+beta+gamma+delta-1, alpha-t, alpha+t;
                   alpha+beta, alpha+gamma, alpha+delta; 1),

a polynomial of degree ``n`` in ``t^2``.  Attached to the sphere system at
level ``N`` the dictionary is

    alpha = (k2+k3+1)/2,  beta = -N - alpha,  gamma = (k2-k3+1)/2,
    delta = N + k1 + (k2+k3+3)/2,

with lattice ``t = q + alpha``.  Difference operators act on callables
``f(t)``; parameters are read from a :class:`WilsonParams`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DivergenceError, ParameterError, PoleError
from .report import CheckResult
from .specialfn import HypSeriesSpec, hyp_pfq, is_nonpositive_integer, log_gamma_ratio, pochhammer
from .sphere import Params3, l2_eigenvalue

__all__ = [
    "WilsonParams",
    "phi_n",
    "wilson_poly",
    "pk_basis",
    "solve_wk",
    "tau_apply",
    "tau_star_apply",
    "mu_apply",
    "eigen_residual",
    "racah_weight",
    "log_norm_lambda_gamma_form",
    "racah_gram",
    "orthogonality_defect",
    "permutation_covariant",
    "all_permutations",
    "mu_shift_identities",
    "tau_shift_identity",
    "pk_identities",
    "wk_residual",
    "check_duality",
    "tau_star_tau",
    "recurrence_3term",
    "wilson_gram",
    "WILSON_WINDOW",
]

NAMES = ("alpha", "beta", "gamma", "delta")


@dataclass(frozen=True)
class WilsonParams:
    alpha: float
    beta: float
    gamma: float
    delta: float
    provenance: tuple[float, float, float, float] | None = None  # (k1, k2, k3, N)

    @classmethod
    def from_k(cls, k: Params3, N: float) -> "WilsonParams":
        k1, k2, k3 = k.k
        a = (k2 + k3 + 1) / 2
        return cls(a, -N - a, (k2 - k3 + 1) / 2, N + k1 + (k2 + k3 + 3) / 2, (k1, k2, k3, float(N)))

    def to_k(self) -> tuple[float, float, float, float]:
        """Inverse dictionary: ``(k1, k2, k3, N)``."""
        a, b, g, d = self.as_tuple()
        return d + b - 1, a + g - 1, a - g, -a - b

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    @property
    def e1(self) -> float:
        return self.alpha + self.beta + self.gamma + self.delta

    @property
    def t0(self) -> float:
        return self.alpha

    def t(self, q: float) -> float:
        """Lattice point ``q + alpha``."""
        return q + self.alpha

    def shifted(self, da=0.0, db=0.0, dg=0.0, dd=0.0) -> "WilsonParams":
        return WilsonParams(self.alpha + da, self.beta + db, self.gamma + dg, self.delta + dd)

    def permuted(self, perm: Sequence[int]) -> "WilsonParams":
        p = self.as_tuple()
        return WilsonParams(*(p[i] for i in perm))

    def get(self, name: str) -> float:
        return getattr(self, name)


def _require_integer_degree(n) -> int:
    if int(n) != n or n < 0:
        raise ParameterError(f"polynomial degree must be a nonnegative integer, got {n}")
    return int(n)


def phi_n(n: int, w: WilsonParams, t: float) -> float:
    """Racah/Wilson polynomial ``Phi_n(t)`` normalised by ``Phi_n(t)|_{k=0 term} = 1``."""
    n = _require_integer_degree(n)
    a, b, g, d = w.as_tuple()
    spec = HypSeriesSpec([-n, n + w.e1 - 1, a - t, a + t], [a + b, a + g, a + d], 1.0)
    return hyp_pfq(spec).value


def wilson_poly(n: int, w: WilsonParams, t: float) -> float:
    """Alias of :func:`phi_n`.

    When ``alpha + beta = -m`` only degrees ``n <= m`` form the finite Racah
    family; larger ``n`` is rejected.
    """
    s = w.alpha + w.beta
    if is_nonpositive_integer(s, 1e-12) and n > -round(s):
        raise ParameterError(f"Racah family has degrees 0..{-round(s)}; got n={n}")
    return phi_n(n, w, t)


def pk_basis(k: int, alpha: float, t: float) -> float:
    """``P_k(alpha, t) = (alpha+t)_k (alpha-t)_k``."""
    return pochhammer(alpha + t, k) * pochhammer(alpha - t, k)


def solve_wk(n: int, w: WilsonParams) -> list[float]:
    """Coefficients with ``Phi_n = sum_k w_k P_k(alpha, t)``, from the two-term recurrence."""
    n = _require_integer_degree(n)
    a, b, g, d = w.as_tuple()
    out = [1.0]
    for k in range(n):
        den = (k + 1) * (a + b + k) * (a + g + k) * (a + d + k)
        if den == 0:
            raise PoleError(f"coefficient recurrence hits a pole at k={k}")
        out.append(out[-1] * (k - n) * (n + w.e1 + k - 1) / den)
    return out


def _check_t(t: float) -> None:
    if t == 0:
        raise ZeroDivisionError("difference operators divide by 2t")


def tau_apply(f: Callable[[float], float], t: float) -> float:
    """``tau f(t) = [f(t+1/2) - f(t-1/2)] / (2t)``.

    Lowers every parameter by one half: it maps functions in the
    ``(alpha, beta, gamma, delta)`` family to the ``(alpha+1/2, ...)`` family.
    """
    _check_t(t)
    return (f(t + 0.5) - f(t - 0.5)) / (2 * t)


def tau_star_apply(f: Callable[[float], float], w: WilsonParams, t: float) -> float:
    """``tau* f(t) = [prod(p+t) f(t+1/2) - prod(p-t) f(t-1/2)] / (2t)``, ``p`` over ``w``."""
    _check_t(t)
    p = w.as_tuple()
    plus = math.prod(x + t for x in p)
    minus = math.prod(x - t for x in p)
    return (plus * f(t + 0.5) - minus * f(t - 0.5)) / (2 * t)


def mu_apply(pair: tuple[str, str], f: Callable[[float], float], w: WilsonParams, t: float) -> float:
    """``mu^(u,v) f(t) = [(u+t)(v+t) f(t+1/2) - (u-t)(v-t) f(t-1/2)] / (2t)``.

    ``pair`` names two of alpha, beta, gamma, delta; their values are read
    from ``w``, the parameters of the *image* family.
    """
    _check_t(t)
    u, v = (w.get(name) for name in pair)
    return ((u + t) * (v + t) * f(t + 0.5) - (u - t) * (v - t) * f(t - 0.5)) / (2 * t)


def tau_star_tau(f: Callable[[float], float], w: WilsonParams, t: float) -> float:
    return tau_star_apply(lambda s: tau_apply(f, s), w, t)


def eigen_residual(n: int, w: WilsonParams, t: float, shift: int = -1, relative: bool = True) -> float:
    """``(tau* tau - n(n + e1 + shift)) Phi_n(t)``, ``e1 = alpha+beta+gamma+delta``.

    ``shift=-1`` is the eigenvalue that holds; ``shift=0`` is offered to
    exhibit the alternative.  With ``relative`` the residual is divided by
    the larger of the two sides (or 1 when both vanish).
    """
    lhs = tau_star_tau(lambda s: phi_n(n, w, s), w, t)
    rhs = n * (n + w.e1 + shift) * phi_n(n, w, t)
    r = lhs - rhs
    if not relative:
        return r
    return r / max(abs(lhs), abs(rhs), 1.0)


# -- weight and orthogonality ------------------------------------------------


def racah_weight(q: int, w: WilsonParams) -> float:
    """Orthogonality weight on the lattice point ``t = q + alpha``."""
    a, b, g, d = w.as_tuple()
    num = [2 * a, a + 1, a + b, a + g, a + d]
    den = [a, a - b + 1, a - g + 1, a - d + 1, 1.0]
    out = 1.0
    for j in range(q):
        for x in num:
            out *= x + j
        for y in den:
            if y + j == 0:
                raise PoleError(f"weight denominator vanishes at q={q}")
            out /= y + j
    return out


def log_norm_lambda_gamma_form(t: float, w: WilsonParams) -> tuple[float, int]:
    """Gamma-ratio proportional to the squared norm of Lambda' at ``t``.

    ``prod Gamma(t-p+1) Gamma(t) / (prod Gamma(t+p) Gamma(t+1))`` over the
    four parameters; returned as ``(log|value|, sign)``.
    """
    p = w.as_tuple()
    return log_gamma_ratio([t - x + 1 for x in p] + [t], [t + x for x in p] + [t + 1])


def racah_gram(w: WilsonParams, nmax: int, qmax: int) -> np.ndarray:
    """``G[i, j] = sum_{q<=qmax} weight(q) Phi_i(t_q) Phi_j(t_q)`` for ``i, j <= nmax``."""
    q = np.arange(qmax + 1)
    wt = np.array([racah_weight(int(j), w) for j in q])
    P = np.array([[phi_n(n, w, w.t(float(j))) for j in q] for n in range(nmax + 1)])
    return (P * wt) @ P.T


def orthogonality_defect(G: np.ndarray) -> float:
    """Largest ``|G_ij| / sqrt(|G_ii G_jj|)`` over ``i != j``."""
    d = np.sqrt(np.abs(np.diag(G)))
    R = np.abs(G) / np.outer(d, d)
    np.fill_diagonal(R, 0.0)
    return float(R.max()) if R.size > 1 else 0.0


# Convergent window for the infinite lattice sum: the weight decays like
# q^(2 e1 - 3) and Phi_n grows like q^(2n), so n1 + n2 + e1 < 1 is needed.
# alpha + beta = -N with N = -2.3 (a negative non-integer), e1 = -15.5.
WILSON_WINDOW = WilsonParams(0.3, 2.0, -8.7, -9.1)


def _wilson_terms(w: WilsonParams, nmax: int, q: int) -> np.ndarray:
    t = w.t(float(q))
    return np.array([phi_n(n, w, t) for n in range(nmax + 1)])


def wilson_gram(w: WilsonParams, nmax: int, tail_tol: float = 1e-16, qcap: int = 200_000):
    """Infinite-lattice Gram matrix truncated adaptively.

    Summation stops once the largest entry of the latest term, relative to
    the corresponding diagonal, stays below ``tail_tol`` for 20 consecutive
    ``q`` and the decay exponent guarantees the remainder is smaller still.

    Returns ``(G, q_last)``.
    """
    decay = 2 * w.e1 - 3 + 4 * nmax
    if decay >= -1:
        raise DivergenceError(f"lattice sum diverges: terms decay like q^{decay:.2f}")
    G = np.zeros((nmax + 1, nmax + 1))
    wt = 1.0
    a, b, g, d = w.as_tuple()
    num = [2 * a, a + 1, a + b, a + g, a + d]
    den = [a, a - b + 1, a - g + 1, a - d + 1, 1.0]
    quiet = 0
    for q in range(qcap):
        if q > 0:
            j = q - 1
            for x in num:
                wt *= x + j
            for y in den:
                wt /= y + j
        v = _wilson_terms(w, nmax, q)
        term = wt * np.outer(v, v)
        G += term
        diag = np.sqrt(np.abs(np.diag(G)))
        rel = np.max(np.abs(term) / np.outer(diag, diag))
        # remainder of a q^decay tail is about q * term / (-decay - 1)
        tail = rel * q / (-decay - 1) if q else rel
        quiet = quiet + 1 if tail < tail_tol else 0
        if quiet >= 20:
            return G, q
    raise DivergenceError("lattice sum did not reach the tail tolerance")


# -- symmetry and recurrence ----------------------------------------------------


def permutation_covariant(n: int, w: WilsonParams, t: float, perm: Sequence[int] = (0, 1, 2, 3)) -> float:
    """``(alpha+beta)_n (alpha+gamma)_n (alpha+delta)_n Phi_n(t)`` under a permutation of the parameters."""
    v = w.permuted(perm)
    a, b, g, d = v.as_tuple()
    return pochhammer(a + b, n) * pochhammer(a + g, n) * pochhammer(a + d, n) * phi_n(n, v, t)


def all_permutations():
    return list(itertools.permutations(range(4)))


def recurrence_3term(N: int, q: int, k: Params3) -> float:
    """Residual ``||(M'^T - lambda_q) v_q||_inf / (|lambda_q| ||v_q||_inf)``.

    ``M'`` is the L2 matrix in the rescaled Psi' basis and
    ``v_q = (Phi_n(t_q))_n``, which is proportional to the interbasis
    coefficients times the Psi' norms (the proportionality constant does not
    depend on ``n``).
    """
    from .quadalg import l2_matrix

    w = WilsonParams.from_k(k, N)
    v = np.array([phi_n(n, w, w.t(q)) for n in range(N + 1)])
    M = l2_matrix(N, k, "psi_prime").entries
    lam = l2_eigenvalue(q, k)
    r = (M.T - lam * np.eye(N + 1)) @ v
    return float(np.max(np.abs(r)) / (max(abs(lam), 1.0) * np.max(np.abs(v))))


def check_duality(N: int, k: Params3, tol: float = 1e-12) -> CheckResult:
    """``Phi_n`` at ``t_q`` equals the dual polynomial with ``(k1, n) <-> (k3, q)``."""
    w, wd = WilsonParams.from_k(k, N), WilsonParams.from_k(k.swap13(), N)
    res = 0.0
    for n in range(N + 1):
        for q in range(N + 1):
            a, b = phi_n(n, w, w.t(q)), phi_n(q, wd, wd.t(n))
            res = max(res, abs(a - b) / max(abs(a), 1.0))
    return CheckResult.from_residual(f"duality N={N}", "transpositions k_1<->k_3, n<->q", tol, res)


# -- parameter-shift identities --------------------------------------------------


def mu_shift_identities(n: int, w: WilsonParams, t: float) -> dict[str, float]:
    """Relative residuals of the three documented mu-operator relations.

    Each relation maps ``Phi_n`` of a half-shifted family to a multiple of
    ``Phi_n`` of ``w``; the operator uses the parameters of ``w``.
    """
    a, b, g, d = w.as_tuple()
    target = phi_n(n, w, t)
    rows = {
        "mu(beta,delta)": (("beta", "delta"), w.shifted(-0.5, 0.5, -0.5, 0.5), (n + b + d) * (n + a + g - 1) / (a + g - 1)),
        "mu(alpha,beta)": (("alpha", "beta"), w.shifted(0.5, 0.5, -0.5, -0.5), a + b),
        "mu(alpha,delta)": (("alpha", "delta"), w.shifted(0.5, -0.5, -0.5, 0.5), a + d),
    }
    out = {}
    for name, (pair, src, c) in rows.items():
        lhs = mu_apply(pair, lambda s, src=src: phi_n(n, src, s), w, t)
        out[name] = abs(lhs - c * target) / max(abs(c * target), abs(lhs), 1.0)
    return out


def tau_shift_identity(n: int, w: WilsonParams, t: float) -> float:
    """``tau Phi_n^(w) = n(n+e1-1)/((a+b)(a+g)(a+d)) Phi_{n-1}^(w + 1/2)``, relative residual.

    Follows termwise from ``tau P_k(a, t) = -k P_{k-1}(a+1/2, t)``.
    """
    a, b, g, d = w.as_tuple()
    lhs = tau_apply(lambda s: phi_n(n, w, s), t)
    if n == 0:
        return abs(lhs)
    c = n * (n + w.e1 - 1) / ((a + b) * (a + g) * (a + d))
    rhs = c * phi_n(n - 1, w.shifted(0.5, 0.5, 0.5, 0.5), t)
    return abs(lhs - rhs) / max(abs(rhs), abs(lhs), 1.0)


def pk_identities(kmax: int, w: WilsonParams, t: float) -> dict[str, float]:
    """Relative residuals of the tau / tau* actions on the ``P_k`` basis and of the w_k recurrence."""
    a, b, g, d = w.as_tuple()
    r_tau = r_star = r_two = 0.0
    for k in range(1, kmax + 1):
        lhs = tau_apply(lambda s: pk_basis(k, a, s), t)
        rhs = -k * pk_basis(k - 1, a + 0.5, t)
        r_tau = max(r_tau, abs(lhs - rhs) / max(abs(rhs), 1.0))
    for k in range(kmax + 1):
        lhs = tau_star_apply(lambda s: pk_basis(k, a + 0.5, s), w, t)
        t1 = -(w.e1 + k) * pk_basis(k + 1, a, t)
        t2 = (a + b + k) * (a + g + k) * (a + d + k) * pk_basis(k, a, t)
        # scaled by the largest term: the two terms cancel strongly at large t
        r_star = max(r_star, abs(lhs - t1 - t2) / max(abs(t1), abs(t2), 1.0))
        # tau* tau on P_k: two-term recurrence
        lhs = tau_star_tau(lambda s: pk_basis(k, a, s), w, t)
        t1 = k * (w.e1 + k - 1) * pk_basis(k, a, t)
        t2 = -k * (a + b + k - 1) * (a + g + k - 1) * (a + d + k - 1) * pk_basis(k - 1, a, t) if k else 0.0
        r_two = max(r_two, abs(lhs - t1 - t2) / max(abs(t1), abs(t2), abs(lhs), 1.0))
    return {"tau P_k": r_tau, "tau* P_k": r_star, "tau*tau P_k": r_two}


def wk_residual(n: int, w: WilsonParams, t: float) -> float:
    """``sum_k w_k P_k(alpha, t)`` against ``Phi_n(t)`` and the closed product form of ``w_k``."""
    a, b, g, d = w.as_tuple()
    wk = solve_wk(n, w)
    closed = [
        pochhammer(-n, k) * pochhammer(n + w.e1 - 1, k)
        / (math.factorial(k) * pochhammer(a + b, k) * pochhammer(a + g, k) * pochhammer(a + d, k))
        for k in range(n + 1)
    ]
    s = sum(c * pk_basis(k, a, t) for k, c in enumerate(wk))
    ref = phi_n(n, w, t)
    r1 = abs(s - ref) / max(abs(ref), 1.0)
    r2 = max(abs(x - y) / max(abs(y), 1.0) for x, y in zip(wk, closed))
    return max(r1, r2)

