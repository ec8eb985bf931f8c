import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racahlab.errors import DivergenceError, PoleError
from racahlab.suite import limit_residual, panel_rng, wilsonfn_panel
from racahlab.wilson import WilsonParams, phi_n
from racahlab.wilsonfn import (
    in_convergence_window,
    mixing_coefficient,
    phi_general,
    phi_partial_identity,
    phi_residual,
    psi_residual,
    psi_second,
    q_basis,
    q_shift_residuals,
    wilson_3term_residual,
    wilson_eigen_residual,
    wilson_function,
    wilson_murec_residual,
)

W = WilsonParams(0.6, 0.2, 0.9, 1.1)
T = 0.37
NONINT = [-1.7, -0.7, 0.3, 1.3, 2.3]


def test_q_basis_k0_is_gamma_prefactor():
    a, b, _, _ = W.as_tuple()
    ref = math.gamma(1 - b + T) * math.gamma(1 - b - T) / (math.gamma(a + T) * math.gamma(a - T))
    assert q_basis(0, W, T) == pytest.approx(ref, rel=1e-14)


def test_q_shift_relations():
    # t = 0.3 (mod 1/2) would put a Gamma argument on a pole
    for t in (0.37, 1.15, 1.45):
        assert max(q_shift_residuals(4, W, t).values()) < 1e-11


def test_phi_general_against_mpmath():
    a, b, g, d = W.as_tuple()
    for n in (0.7, 1.3):
        ref = mpmath.hyper([-n, n + W.e1 - 1, a + T, a - T], [a + b, a + g, a + d], 1)
        val, info = phi_general(n, W, T, with_info=True)
        assert info.converged
        assert val == pytest.approx(float(ref), rel=1e-11)


def test_phi_general_reduces_to_polynomial():
    assert phi_general(3, W, T) == pytest.approx(phi_n(3, W, T), rel=1e-14)


def test_psi_second_against_mpmath():
    a, b, g, d = W.as_tuple()
    n = 1.3
    pre = mpmath.gamma(1 - b + T) * mpmath.gamma(1 - b - T) / (mpmath.gamma(a + T) * mpmath.gamma(a - T))
    ref = pre * mpmath.hyper([1 - n - a - b, n + g + d, 1 - b + T, 1 - b - T], [2 - a - b, 1 - b + g, 1 - b + d], 1)
    assert psi_second(n, W, T) == pytest.approx(float(ref), rel=1e-11)


def test_psi_second_terminating_case():
    # 1 - n - a - b = -2 terminates the series after three terms
    a, b, g, d = W.as_tuple()
    n = 3 - a - b
    lg = math.gamma(1 - b + T) * math.gamma(1 - b - T) / (math.gamma(a + T) * math.gamma(a - T))
    num = [-2, n + g + d, 1 - b + T, 1 - b - T]
    den = [2 - a - b, 1 - b + g, 1 - b + d]
    direct = sum(
        np.prod([float(mpmath.rf(p, j)) for p in num]) / (np.prod([float(mpmath.rf(p, j)) for p in den]) * math.factorial(j))
        for j in range(3)
    )
    val, info = psi_second(n, W, T, with_info=True)
    assert val == pytest.approx(lg * direct, rel=1e-13)
    assert info.K == 3


def test_partial_sum_identity_selects_bracket():
    for K in (0, 3, 7):
        lhs, rhs = phi_partial_identity(1.3, W, T, K)
        assert lhs == pytest.approx(rhs, rel=1e-12)
        lhs0, rhs0 = phi_partial_identity(1.3, W, T, K, shift=0)
        assert abs(lhs0 - rhs0) > 1e-3 * abs(rhs0)


@pytest.mark.parametrize("n", NONINT)
def test_residual_identities(n):
    assert abs(phi_residual(n, W, T)) < 1e-6
    assert abs(psi_residual(n, W, T)) < 1e-6
    assert abs(phi_residual(n, W, T, shift=0)) > 1e-2


def test_integer_degree_residual_vanishes():
    for m in range(4):
        assert abs(phi_residual(m, W, T)) < 1e-10


@pytest.mark.parametrize("n", NONINT)
def test_wilson_function_identities(n):
    assert wilson_eigen_residual(n, W, T) < 1e-7
    assert wilson_murec_residual(n, W, T) < 1e-7
    assert wilson_3term_residual(n, W, T) < 1e-6


def test_plain_phi_fails_recurrence_for_noninteger_degree():
    # without the Psi correction the eigenvalue equation fails
    f = lambda s: phi_general(1.3, W, s)  # noqa: E731
    from racahlab.wilson import tau_star_tau

    lhs = tau_star_tau(f, W, T) - 1.3 * (1.3 + W.e1 - 1) * f(T)
    assert abs(lhs) > 1e-3


def test_mixing_coefficient_vanishes_at_integers():
    for m in range(4):
        assert mixing_coefficient(m, W) == 0.0
        assert wilson_function(m, W, T) == phi_n(m, W, T)


def test_pole_guard():
    with pytest.raises(PoleError):
        mixing_coefficient(2 + 1e-10, W)
    assert math.isfinite(mixing_coefficient(2 + 1e-10, W, guard=None))


def test_integer_limit():
    for m in (0, 1, 2, 3):
        assert limit_residual(m, W, T) < 1e-5


def test_window():
    assert in_convergence_window(W)
    bad = WilsonParams(0.6, 1.5, 0.9, 1.1)  # 2 - a - b < 0
    assert not in_convergence_window(bad)
    with pytest.raises(DivergenceError):
        wilson_function(1.3, bad, T)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_panel(seed):
    for w, n, t in wilsonfn_panel(panel_rng(seed, 8), 2):
        assert in_convergence_window(w)
        assert abs(n - round(n)) >= 0.1
        assert wilson_eigen_residual(n, w, t) < 1e-7
