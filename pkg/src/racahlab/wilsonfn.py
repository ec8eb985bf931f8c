"""Wilson functions: the non-polynomial solutions for non-integer degree.

For real ``n`` the series

    Phi_n(t) = 4F3(-n, n+e1-1, alpha+t, alpha-t; alpha+beta, alpha+gamma, alpha+delta; 1)

no longer terminates and fails the eigenvalue equation by a Gamma-ratio
term.  A second solution ``Psi_n`` (a Gamma prefactor times another 1-balanced
4F3) fails by a proportional term, and the combination

    ~Phi_n = Phi_n - m(n) Psi_n

satisfies ``tau* tau ~Phi_n = n(n+e1-1) ~Phi_n``.  Here ``e1`` is
``alpha+beta+gamma+delta``.  Both series have balance one, so their partial
sums converge like ``K^-1``; :func:`racahlab.specialfn.hyp_pfq`
extrapolates them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivergenceError, ParameterError, PoleError
from .specialfn import HypSeriesSpec, hyp_pfq, is_nonpositive_integer, log_gamma_ratio, pochhammer
from .wilson import WilsonParams, mu_apply, phi_n, tau_apply, tau_star_apply, tau_star_tau

__all__ = [
    "SeriesTruncation",
    "in_convergence_window",
    "q_basis",
    "q_shift_residuals",
    "phi_general",
    "psi_second",
    "phi_partial_identity",
    "phi_rhs",
    "psi_rhs",
    "phi_residual",
    "psi_residual",
    "mixing_coefficient",
    "wilson_function",
    "wilson_eigen_residual",
    "wilson_murec_residual",
    "wilson_3term_residual",
    "POLE_GUARD",
]

POLE_GUARD = 1e-8


@dataclass(frozen=True)
class SeriesTruncation:
    """How a non-terminating series was cut: last partial-sum index, tail estimate, flag."""

    K: int
    tail_estimate: float
    converged: bool


def in_convergence_window(w: WilsonParams) -> bool:
    """Parameter window in which both 4F3 series and their Gamma prefactors are regular.

    Requires ``alpha+beta``, ``alpha+gamma``, ``alpha+delta``, ``gamma+delta``,
    ``1-beta+gamma``, ``1-beta+delta`` and ``2-alpha-beta`` all positive.
    Both series then have balance one.
    """
    a, b, g, d = w.as_tuple()
    return min(a + b, a + g, a + d, g + d, 1 - b + g, 1 - b + d, 2 - a - b) > 0


def _series(num, den, tol: float = 1e-14):
    spec = HypSeriesSpec(num, den, 1.0, max_terms=100_000, tail_tolerance=tol)
    res = hyp_pfq(spec)
    return res.value, SeriesTruncation(res.terms_used, res.error_estimate, not res.truncated)


def phi_general(n: float, w: WilsonParams, t: float, with_info: bool = False):
    """``Phi_n(t)`` for real ``n``; terminating when ``n`` is a nonnegative integer."""
    a, b, g, d = w.as_tuple()
    val, info = _series([-n, n + w.e1 - 1, a + t, a - t], [a + b, a + g, a + d])
    return (val, info) if with_info else val


def _log_prefactor(w: WilsonParams, t: float) -> tuple[float, int]:
    a, b, _, _ = w.as_tuple()
    return log_gamma_ratio([1 - b + t, 1 - b - t], [a + t, a - t])


def q_basis(k: int, w: WilsonParams, t: float) -> float:
    """``Q(t, alpha, beta)_k = Gamma(1-beta+t) Gamma(1-beta-t) / (Gamma(alpha+t) Gamma(alpha-t)) (1-beta+t)_k (1-beta-t)_k``."""
    lg, s = _log_prefactor(w, t)
    b = w.beta
    return s * math.exp(lg) * pochhammer(1 - b + t, k) * pochhammer(1 - b - t, k)


def q_shift_residuals(kmax: int, w: WilsonParams, t: float) -> dict[str, float]:
    """Relative residuals of the tau and tau* actions on ``Q_k``.

    ``tau Q(t,a,b)_k = (a+b-k-1) Q(t,a+1/2,b+1/2)_k`` and
    ``tau* Q(t,a+1/2,b+1/2)_k = -(g+d+k) Q(t,a,b)_k + k(k-b+d)(k-b+g) Q(t,a,b)_{k-1}``.
    """
    a, b, g, d = w.as_tuple()
    up = w.shifted(0.5, 0.5, 0.0, 0.0)
    r1 = r2 = 0.0
    for k in range(kmax + 1):
        lhs = tau_apply(lambda s: q_basis(k, w, s), t)
        rhs = (a + b - k - 1) * q_basis(k, up, t)
        r1 = max(r1, abs(lhs - rhs) / max(abs(rhs), abs(lhs), 1e-300))
        lhs = tau_star_apply(lambda s: q_basis(k, up, s), w, t)
        rhs = -(g + d + k) * q_basis(k, w, t)
        if k:
            rhs += k * (k - b + d) * (k - b + g) * q_basis(k - 1, w, t)
        r2 = max(r2, abs(lhs - rhs) / max(abs(rhs), abs(lhs), 1e-300))
    return {"tau Q_k": r1, "tau* Q_k": r2}


def psi_second(n: float, w: WilsonParams, t: float, with_info: bool = False):
    """Second solution: Gamma prefactor times
    ``4F3(1-n-a-b, n+g+d, 1-b+t, 1-b-t; 2-a-b, 1-b+g, 1-b+d; 1)``."""
    a, b, g, d = w.as_tuple()
    lg, s = _log_prefactor(w, t)
    val, info = _series([1 - n - a - b, n + g + d, 1 - b + t, 1 - b - t], [2 - a - b, 1 - b + g, 1 - b + d])
    out = s * math.exp(lg) * val
    return (out, info) if with_info else out


def _signed_exp(lg_sign: tuple[float, int]) -> float:
    lg, s = lg_sign
    return 0.0 if s == 0 else s * math.exp(lg)


def phi_rhs(n: float, w: WilsonParams, t: float) -> float:
    """``Gamma(a+b) Gamma(a+g) Gamma(a+d) / (Gamma(-n) Gamma(n+e1-1) Gamma(a+t) Gamma(a-t))``.

    Vanishes at nonnegative integer ``n`` through the pole of ``Gamma(-n)``.
    """
    a, b, g, d = w.as_tuple()
    return _signed_exp(log_gamma_ratio([a + b, a + g, a + d], [-n, n + w.e1 - 1, a + t, a - t]))


def psi_rhs(n: float, w: WilsonParams, t: float) -> float:
    a, b, g, d = w.as_tuple()
    return _signed_exp(log_gamma_ratio([2 - a - b, 1 - b + g, 1 - b + d], [1 - n - a - b, n + g + d, a + t, a - t]))


def _eigenvalue(n: float, w: WilsonParams, shift: int) -> float:
    return n * (n + w.e1 + shift)


def phi_partial_identity(n: float, w: WilsonParams, t: float, K: int, shift: int = -1) -> tuple[float, float]:
    """Both sides of the truncated identity for ``S_K = sum_{k<=K} w_k P_k(alpha, t)``.

    Left: ``(tau* tau - n(n+e1+shift)) S_K``.  Right:
    ``(-n)_{K+1} (n+e1-1)_{K+1} / (K! (a+b)_K (a+g)_K (a+d)_K) (a+t)_K (a-t)_K``.
    With ``shift=-1`` the two agree exactly for every ``K``.
    """
    a, b, g, d = w.as_tuple()

    def S(s):
        tot, term = 0.0, 1.0
        for k in range(K + 1):
            tot += term * pochhammer(a + s, k) * pochhammer(a - s, k)
            term *= (k - n) * (n + w.e1 - 1 + k) / ((k + 1) * (a + b + k) * (a + g + k) * (a + d + k))
        return tot

    lhs = tau_star_tau(S, w, t) - _eigenvalue(n, w, shift) * S(t)
    rhs = (
        pochhammer(-n, K + 1) * pochhammer(n + w.e1 - 1, K + 1)
        / (math.factorial(K) * pochhammer(a + b, K) * pochhammer(a + g, K) * pochhammer(a + d, K))
        * pochhammer(a + t, K) * pochhammer(a - t, K)
    )
    return lhs, rhs


def _relative(lhs: float, rhs: float, scale: float) -> float:
    if rhs == 0.0:
        return abs(lhs) / max(scale, 1.0)
    return (lhs - rhs) / abs(rhs)


def phi_residual(n: float, w: WilsonParams, t: float, shift: int = -1) -> float:
    """``(lhs - rhs)/|rhs|`` for ``(tau* tau - n(n+e1+shift)) Phi_n = phi_rhs``.

    ``shift=-1`` is the constant that holds; ``shift=0`` reproduces the
    alternative bracket and leaves an O(1) residual.  For nonnegative
    integer ``n`` the right side is zero and the scaled left side is
    returned instead.
    """
    f = lambda s: phi_general(n, w, s)  # noqa: E731
    tt = tau_star_tau(f, w, t)
    lhs = tt - _eigenvalue(n, w, shift) * f(t)
    return _relative(lhs, phi_rhs(n, w, t), abs(tt))


def psi_residual(n: float, w: WilsonParams, t: float, shift: int = -1) -> float:
    """As :func:`phi_residual` for the second solution."""
    f = lambda s: psi_second(n, w, s)  # noqa: E731
    tt = tau_star_tau(f, w, t)
    lhs = tt - _eigenvalue(n, w, shift) * f(t)
    return _relative(lhs, psi_rhs(n, w, t), abs(tt))


def mixing_coefficient(n: float, w: WilsonParams, guard: float | None = POLE_GUARD) -> float:
    """Coefficient of ``Psi_n`` in the Wilson function.

    ``Gamma(a+b)Gamma(a+g)Gamma(a+d)Gamma(1-n-a-b)Gamma(n+g+d) /
    (Gamma(-n)Gamma(n+e1-1)Gamma(2-a-b)Gamma(1-b+g)Gamma(1-b+d))``, in log
    space.  Exactly zero at nonnegative integers.  Within ``guard`` of a
    nonnegative integer (but not on it) a :class:`PoleError` is raised, as
    the ratio is then dominated by rounding in ``1/Gamma(-n)``; pass
    ``guard=None`` to evaluate anyway.
    """
    a, b, g, d = w.as_tuple()
    r = round(n)
    if guard is not None and r >= 0 and 0 < abs(n - r) < guard:
        raise PoleError(f"n={n} within {guard} of the integer {r}")
    return _signed_exp(
        log_gamma_ratio(
            [a + b, a + g, a + d, 1 - n - a - b, n + g + d],
            [-n, n + w.e1 - 1, 2 - a - b, 1 - b + g, 1 - b + d],
        )
    )


def wilson_function(n: float, w: WilsonParams, t: float, guard: float | None = POLE_GUARD) -> float:
    """``~Phi_n(t) = Phi_n(t) - mixing_coefficient(n) Psi_n(t)``."""
    if not in_convergence_window(w):
        raise DivergenceError(f"parameters {w.as_tuple()} outside the convergence window")
    if is_nonpositive_integer(-n):
        return phi_n(int(round(n)), w, t)
    return phi_general(n, w, t) - mixing_coefficient(n, w, guard) * psi_second(n, w, t)


def wilson_eigen_residual(n: float, w: WilsonParams, t: float) -> float:
    """``|(tau* tau - n(n+e1-1)) ~Phi_n(t)| / |~Phi_n(t)|``."""
    f = lambda s: wilson_function(n, w, s)  # noqa: E731
    v = f(t)
    return abs(tau_star_tau(f, w, t) - _eigenvalue(n, w, -1) * v) / abs(v)


def wilson_murec_residual(n: float, w: WilsonParams, t: float) -> float:
    """``mu^(a,b) ~Phi_n^(a+1/2, b+1/2, g-1/2, d-1/2) = (a+b) ~Phi_n^(a,b,g,d)``, relative."""
    src = w.shifted(0.5, 0.5, -0.5, -0.5)
    lhs = mu_apply(("alpha", "beta"), lambda s: wilson_function(n, src, s), w, t)
    rhs = (w.alpha + w.beta) * wilson_function(n, w, t)
    return abs(lhs - rhs) / abs(rhs)


def wilson_3term_residual(n: float, w: WilsonParams, t: float) -> float:
    """Three-term recurrence in the degree, relative to ``|(t^2-a^2) ~Phi_n|``.

    ``(t^2 - a^2) F_n = A_n F_{n+1} - (A_n + C_n) F_n + C_n F_{n-1}`` with
    ``A_n = (n+e1-1)(n+a+b)(n+a+g)(n+a+d) / ((2n+e1-1)(2n+e1))`` and
    ``C_n = n(n+b+g-1)(n+b+d-1)(n+g+d-1) / ((2n+e1-2)(2n+e1-1))``.
    """
    a, b, g, d = w.as_tuple()
    e = w.e1
    A = (n + e - 1) * (n + a + b) * (n + a + g) * (n + a + d) / ((2 * n + e - 1) * (2 * n + e))
    C = n * (n + b + g - 1) * (n + b + d - 1) * (n + g + d - 1) / ((2 * n + e - 2) * (2 * n + e - 1))
    F = [wilson_function(n + j, w, t) for j in (-1, 0, 1)]
    lhs = (t * t - a * a) * F[1]
    rhs = A * F[2] - (A + C) * F[1] + C * F[0]
    return abs(lhs - rhs) / max(abs(lhs), abs(A * F[2]), abs(C * F[0]))


def check_window(w: WilsonParams) -> None:
    if not in_convergence_window(w):
        raise ParameterError(f"parameters {w.as_tuple()} outside the convergence window")
