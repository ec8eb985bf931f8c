"""Gamma, Pochhammer and hypergeometric-series kernel.

Everything here is scalar or numpy-vectorised over the *argument* only;
parameters are plain floats.  Gamma ratios are carried in log space with an
explicit sign so that norm and weight formulas do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import eval_jacobi

from .errors import DivergenceError, PoleError

__all__ = [
    "HypSeriesSpec",
    "HypResult",
    "is_nonpositive_integer",
    "log_gamma",
    "gamma_ratio",
    "log_gamma_ratio",
    "rgamma",
    "pochhammer",
    "hyp_pfq",
    "jacobi_p",
    "jacobi_p_dy",
]

# Above this length a positive-base Pochhammer product is taken from lgamma.
_POCH_DIRECT_MAX = 64
# Terminating series up to this many terms are summed in exact rationals.
_EXACT_TERMS_MAX = 40
_POLE_TOL = 1e-12


def is_nonpositive_integer(x: float, tol: float = 0.0) -> bool:
    r = round(x)
    return r <= 0 and abs(x - r) <= tol


def log_gamma(x: float) -> tuple[float, int]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``.

    Raises
    ------
    PoleError
        If ``x`` is zero or a negative integer.
    """
    x = float(x)
    if is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x > 0:
        return math.lgamma(x), 1
    # Gamma alternates sign between consecutive negative integers.
    sign = -1 if math.ceil(-x) % 2 else 1
    return math.lgamma(x), sign


def log_gamma_ratio(num: Sequence[float], den: Sequence[float]) -> tuple[float, int]:
    """log|prod Gamma(num) / prod Gamma(den)| and its sign.

    A pole in the denominator is a legitimate zero of the ratio and is reported
    as ``(-inf, 0)``; a pole in the numerator raises.
    """
    logv, sign = 0.0, 1
    for a in num:
        lg, s = log_gamma(a)
        logv += lg
        sign *= s
    for b in den:
        if is_nonpositive_integer(b):
            return -math.inf, 0
        lg, s = log_gamma(b)
        logv -= lg
        sign *= s
    return logv, sign


def gamma_ratio(num: Sequence[float], den: Sequence[float]) -> float:
    logv, sign = log_gamma_ratio(num, den)
    if sign == 0:
        return 0.0
    return sign * math.exp(logv)


def rgamma(x: float) -> float:
    """Reciprocal gamma, entire: zero at the poles of Gamma."""
    if is_nonpositive_integer(x):
        return 0.0
    lg, s = log_gamma(x)
    return s * math.exp(-lg)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)``, with ``(a)_0 = 1``."""
    if k < 0:
        raise ValueError("pochhammer order must be nonnegative")
    if k == 0:
        return 1.0
    if is_nonpositive_integer(a) and k > -round(a):
        return 0.0
    if a > 0 and k > _POCH_DIRECT_MAX:
        return math.exp(math.lgamma(a + k) - math.lgamma(a))
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


@dataclass
class HypSeriesSpec:
    """Generalised hypergeometric series pFq(numerator; denominator; argument).

    ``accelerate`` applies only to non-terminating series at unit argument,
    where the terms decay algebraically and plain summation stalls.
    """

    numerator_params: list[float]
    denominator_params: list[float]
    argument: float
    max_terms: int = 100_000
    tail_tolerance: float = 1e-14
    accelerate: bool = True

    def __post_init__(self):
        if self.max_terms <= 0:
            raise ValueError("max_terms must be positive")
        if self.tail_tolerance < 0:
            raise ValueError("tail_tolerance must be nonnegative")
        self.numerator_params = [float(a) for a in self.numerator_params]
        self.denominator_params = [float(b) for b in self.denominator_params]

    @property
    def terminating_order(self) -> int | None:
        """``m`` if some numerator parameter equals ``-m`` (smallest such), else None."""
        orders = [-round(a) for a in self.numerator_params if is_nonpositive_integer(a, _POLE_TOL * max(1.0, abs(a)))]
        return min(orders) if orders else None

    @property
    def balance(self) -> float:
        return sum(self.denominator_params) - sum(self.numerator_params)


@dataclass
class HypResult:
    value: float
    terms_used: int
    truncated: bool
    error_estimate: float = 0.0
    partial_sums: dict[int, float] = field(default_factory=dict, repr=False)


def _term_ratio(spec: HypSeriesSpec, k: int) -> float:
    r = spec.argument / (k + 1)
    for a in spec.numerator_params:
        r *= a + k
    for b in spec.denominator_params:
        r /= b + k
    return r


def _check_denominators(spec: HypSeriesSpec, last_k: int | None) -> None:
    # (b)_k hits zero at k = 1 - b; only a problem if that term is reached.
    # Parameters built by arithmetic land within rounding of the integer.
    for b in spec.denominator_params:
        if is_nonpositive_integer(b, _POLE_TOL * max(1.0, abs(b))):
            j = -round(b)
            if last_k is None or j < last_k:
                raise PoleError(f"denominator parameter {b} reaches a pole before termination")


def _partial_sums(spec: HypSeriesSpec, checkpoints: Sequence[int]) -> dict[int, float]:
    """Partial sums S_K (K terms, k = 0..K-1) at each requested K."""
    out = {}
    targets = sorted(set(checkpoints))
    term, total, k = 1.0, 0.0, 0
    for K in targets:
        while k < K:
            total += term
            term *= _term_ratio(spec, k)
            k += 1
        out[K] = total
    return out


def _richardson_unit(spec: HypSeriesSpec) -> HypResult:
    # S_K = S + K^-s (d0 + d1/K + ...) for a series at z=1 with balance s;
    # eliminate the exponents s, s+1, ... on the geometric sequence K0 2^i.
    s = spec.balance
    scale = max([abs(p) for p in spec.numerator_params + spec.denominator_params] + [1.0])
    k0 = int(max(32, 4 * math.ceil(scale)))
    levels = []
    K = k0
    while K <= spec.max_terms and len(levels) < 10:
        levels.append(K)
        K *= 2
    if len(levels) < 2:
        raise DivergenceError("max_terms too small for accelerated summation")
    sums = _partial_sums(spec, levels)
    table = [[sums[K]] for K in levels]
    best, best_err = table[0][0], math.inf
    for i in range(1, len(levels)):
        for j in range(1, i + 1):
            f = 2.0 ** (s + j - 1)
            table[i].append((f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1.0))
        err = abs(table[i][i] - table[i - 1][i - 1])
        if err < best_err:
            best, best_err = table[i][i], err
        if err <= spec.tail_tolerance * abs(table[i][i]):
            best, best_err = table[i][i], err
            break
    truncated = best_err > spec.tail_tolerance * max(abs(best), 1e-300)
    return HypResult(best, levels[min(i, len(levels) - 1)], truncated, best_err, sums)


def _terminating_sum(spec: HypSeriesSpec, m: int) -> float:
    """Sum ``m + 1`` terms.

    The float parameters are converted exactly to rationals and the sum is
    formed without rounding, so alternating terms that cancel to many digits
    (small ``|t|`` in Racah polynomials) cost nothing.  Long sums fall back
    to ``math.fsum`` of float terms.
    """
    if m > _EXACT_TERMS_MAX or not all(
        math.isfinite(v) for v in spec.numerator_params + spec.denominator_params + [spec.argument]
    ):
        term, terms = 1.0, []
        for k in range(m + 1):
            terms.append(term)
            if k < m:
                term *= _term_ratio(spec, k)
        return math.fsum(terms)
    num = [Fraction(a) for a in spec.numerator_params]
    den = [Fraction(b) for b in spec.denominator_params]
    z = Fraction(spec.argument)
    term, total = Fraction(1), Fraction(0)
    for k in range(m + 1):
        total += term
        if k < m:
            r = z / (k + 1)
            for a in num:
                r *= a + k
            for b in den:
                r /= b + k
            term *= r
    return float(total)


def hyp_pfq(spec: HypSeriesSpec) -> HypResult:
    """Sum a generalised hypergeometric series.

    Terminating series (a numerator parameter equal to ``-m``) are summed
    exactly over ``m + 1`` terms.  Non-terminating series with ``|z| < 1`` are
    summed until the relative term size drops below ``tail_tolerance``; at
    ``z = 1`` the partial sums are Richardson-extrapolated using the known
    algebraic decay (the balance ``sum(b) - sum(a)``) unless ``accelerate`` is
    off.
    """
    m = spec.terminating_order
    _check_denominators(spec, m)
    z = spec.argument
    if m is not None:
        return HypResult(_terminating_sum(spec, m), m + 1, False)

    p, q = len(spec.numerator_params), len(spec.denominator_params)
    if p > q + 1:
        raise DivergenceError("pFq with p > q+1 diverges")
    if p == q + 1:
        if abs(z) > 1:
            raise DivergenceError(f"argument {z} outside the unit disc")
        if z == 1 and spec.balance <= 0:
            raise DivergenceError(f"series at unit argument needs positive balance, got {spec.balance}")
        if z == 1 and spec.accelerate:
            return _richardson_unit(spec)

    term, total = 1.0, 0.0
    for k in range(spec.max_terms):
        total += term
        if k > 0 and abs(term) < spec.tail_tolerance * abs(total):
            return HypResult(total, k + 1, False, abs(term))
        term *= _term_ratio(spec, k)
    return HypResult(total, spec.max_terms, True, abs(term))


def jacobi_p(n: int, alpha: float, beta: float, y):
    """Jacobi polynomial ``P_n^(alpha,beta)(y)``, vectorised over ``y`` (scipy's recurrence)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    out = eval_jacobi(n, alpha, beta, np.asarray(y, dtype=float))
    return out if np.ndim(out) else float(out)


def jacobi_p_dy(n: int, alpha: float, beta: float, y):
    """``d/dy P_n^(alpha,beta)(y) = (n+alpha+beta+1)/2 P_{n-1}^(alpha+1,beta+1)(y)``."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    y = np.asarray(y, dtype=float)
    if n == 0:
        out = np.zeros_like(y)
    else:
        out = 0.5 * (n + alpha + beta + 1) * eval_jacobi(n - 1, alpha + 1, beta + 1, y)
    return out if np.ndim(out) else float(out)
