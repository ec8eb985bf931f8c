import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from racahlab.errors import DivergenceError, PoleError
from racahlab.specialfn import (
    HypSeriesSpec,
    gamma_ratio,
    hyp_pfq,
    jacobi_p,
    jacobi_p_dy,
    log_gamma,
    log_gamma_ratio,
    pochhammer,
    rgamma,
)

reals = st.floats(min_value=-12.0, max_value=12.0, allow_nan=False, allow_subnormal=False)


def test_log_gamma_matches_math():
    for x in (0.3, 1.0, 2.5, 17.2, -0.5, -3.7):
        lg, s = log_gamma(x)
        assert s * math.exp(lg) == pytest.approx(math.gamma(x), rel=1e-13)


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        log_gamma(-3.0)


def test_gamma_ratio_large_arguments():
    # Gamma(200.5)/Gamma(200) ~ sqrt(200) without overflow
    r = gamma_ratio([200.5], [200.0])
    assert r == pytest.approx(float(mpmath.gamma(200.5) / mpmath.gamma(200)), rel=1e-12)


def test_gamma_ratio_sign():
    lg, s = log_gamma_ratio([-0.5, -1.5], [0.5])
    assert s == -1
    assert s * math.exp(lg) == pytest.approx(math.gamma(-0.5) * math.gamma(-1.5) / math.gamma(0.5))


def test_rgamma_zero_at_poles():
    assert rgamma(0.0) == 0.0
    assert rgamma(-4.0) == 0.0
    assert rgamma(2.5) == pytest.approx(1 / math.gamma(2.5))


@given(reals, st.integers(min_value=0, max_value=30))
def test_pochhammer_matches_scipy(a, k):
    ref = special.poch(a, k)
    assert pochhammer(a, k) == pytest.approx(ref, rel=1e-11, abs=1e-300)


@given(reals, st.integers(min_value=0, max_value=20))
def test_pochhammer_recurrence(a, k):
    assert pochhammer(a, k + 1) == pytest.approx(pochhammer(a, k) * (a + k), rel=1e-12, abs=1e-300)


def test_pochhammer_negative_integer_terminates():
    assert pochhammer(-3.0, 4) == 0.0
    assert pochhammer(-3.0, 3) == -6.0


def test_terminating_4f3_against_mpmath():
    num, den = [-5, 3.2, 0.7, 1.9], [1.3, 2.4, 0.6]
    ref = float(mpmath.hyper(num, den, 1))
    res = hyp_pfq(HypSeriesSpec(num, den, 1.0))
    assert not res.truncated
    assert res.value == pytest.approx(ref, rel=1e-14)


def test_pfaff_saalschutz():
    # balanced terminating 3F2(-n, a, b; c, 1+a+b-c-n; 1) = (c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)
    n, a, b, c = 6, 0.37, 1.45, 2.2
    lhs = hyp_pfq(HypSeriesSpec([-n, a, b], [c, 1 + a + b - c - n], 1.0)).value
    rhs = pochhammer(c - a, n) * pochhammer(c - b, n) / (pochhammer(c, n) * pochhammer(c - a - b, n))
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_nonterminating_unit_argument_against_mpmath():
    # balance 1: terms decay like k^-2, plain partial sums stall at ~1e-4
    num, den = [0.3, 1.7, 0.9, 0.4], [1.2, 1.5, 1.6]
    res = hyp_pfq(HypSeriesSpec(num, den, 1.0))
    ref = float(mpmath.hyper(num, den, 1))
    assert res.value == pytest.approx(ref, rel=1e-11)


def test_gauss_2f1_at_one():
    a, b, c = 0.4, 0.7, 2.3
    res = hyp_pfq(HypSeriesSpec([a, b], [c], 1.0))
    assert res.value == pytest.approx(gamma_ratio([c, c - a - b], [c - a, c - b]), rel=1e-11)


def test_divergent_series_rejected():
    with pytest.raises(DivergenceError):
        hyp_pfq(HypSeriesSpec([1.5, 1.2], [0.8], 1.0))


def test_denominator_pole_before_termination():
    with pytest.raises(PoleError):
        hyp_pfq(HypSeriesSpec([-4, 1.0], [-2.0], 1.0))


def test_small_argument_series():
    res = hyp_pfq(HypSeriesSpec([0.5, 1.5], [2.5], 0.3))
    assert res.value == pytest.approx(special.hyp2f1(0.5, 1.5, 2.5, 0.3), rel=1e-14)


@pytest.mark.parametrize("n", [0, 1, 3, 7, 12])
@pytest.mark.parametrize("ab", [(0.5, 1.2), (2.3, 0.1), (3.5, 4.0)])
def test_jacobi_against_scipy(n, ab):
    y = np.linspace(-0.99, 0.99, 41)
    ref = special.eval_jacobi(n, ab[0], ab[1], y)
    assert np.allclose(jacobi_p(n, *ab, y), ref, rtol=1e-11, atol=1e-12 * np.max(np.abs(ref)))


@pytest.mark.parametrize("n", [1, 4, 9])
def test_jacobi_derivative_against_shifted_family(n):
    a, b = 1.3, 0.6
    y = np.linspace(-0.95, 0.95, 21)
    ref = 0.5 * (n + a + b + 1) * special.eval_jacobi(n - 1, a + 1, b + 1, y)
    assert np.allclose(jacobi_p_dy(n, a, b, y), ref, rtol=1e-11, atol=1e-12 * np.max(np.abs(ref)))


def test_jacobi_scalar_in_scalar_out():
    assert isinstance(jacobi_p(3, 0.5, 0.5, 0.2), float)
    assert jacobi_p(0, 0.5, 0.5, 0.2) == 1.0
    assert jacobi_p_dy(0, 0.5, 0.5, 0.2) == 0.0
