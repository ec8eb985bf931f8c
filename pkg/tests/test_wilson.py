import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racahlab.errors import DivergenceError, ParameterError, PoleError
from racahlab.sphere import Params3
from racahlab.wilson import (
    WILSON_WINDOW,
    WilsonParams,
    all_permutations,
    check_duality,
    eigen_residual,
    log_norm_lambda_gamma_form,
    mu_apply,
    mu_shift_identities,
    orthogonality_defect,
    permutation_covariant,
    phi_n,
    pk_basis,
    pk_identities,
    racah_gram,
    racah_weight,
    recurrence_3term,
    solve_wk,
    tau_apply,
    tau_shift_identity,
    tau_star_apply,
    wilson_gram,
    wilson_poly,
    wk_residual,
)

kvals = st.floats(min_value=0.05, max_value=3.0)
GENERIC = WilsonParams(0.7, 1.1, 0.9, 1.3)


def _mp_phi(n, w, t):
    a, b, g, d = w.as_tuple()
    return mpmath.hyper([-n, n + w.e1 - 1, a - t, a + t], [a + b, a + g, a + d], 1)


@given(kvals, kvals, kvals, st.integers(0, 12))
def test_k_dictionary_round_trip(k1, k2, k3, N):
    w = WilsonParams.from_k(Params3(k1, k2, k3), N)
    assert w.to_k() == pytest.approx((k1, k2, k3, N), abs=1e-12)
    assert w.alpha + w.beta == pytest.approx(-N)
    assert w.e1 == pytest.approx(k1 + k2 + 2)


@pytest.mark.parametrize("n", [0, 1, 4, 7])
def test_phi_against_mpmath(n):
    for t in (0.3, 1.7, 4.2):
        assert phi_n(n, GENERIC, t) == pytest.approx(float(_mp_phi(n, GENERIC, t)), rel=1e-13)


def test_phi_zero_is_one():
    assert phi_n(0, GENERIC, 0.77) == 1.0


def test_phi_at_t0_is_one():
    for n in range(6):
        assert phi_n(n, GENERIC, GENERIC.t0) == pytest.approx(1.0, abs=1e-14)


def test_integer_degree_required():
    with pytest.raises(ParameterError):
        phi_n(1.5, GENERIC, 0.3)


def test_racah_family_degree_bound():
    w = WilsonParams.from_k(Params3(0.5, 0.5, 0.5), 3)
    wilson_poly(3, w, w.t(1))
    with pytest.raises(ParameterError):
        wilson_poly(4, w, w.t(1))


def test_pk_basis_examples():
    assert pk_basis(0, 1.3, 0.2) == 1.0
    assert pk_basis(2, 1.0, 0.5) == pytest.approx(2.8125)
    assert pk_basis(3, 0.8, 0.8) == 0.0


def test_solve_wk():
    wk = solve_wk(1, GENERIC)
    a, b, g, d = GENERIC.as_tuple()
    assert wk[0] == 1.0
    assert wk[1] == pytest.approx(-(a + b + g + d) / ((a + b) * (a + g) * (a + d)))
    for n in range(6):
        assert wk_residual(n, GENERIC, 0.83) < 1e-12


def test_tau_operators():
    assert tau_apply(lambda s: 3.0, 0.4) == 0.0
    with pytest.raises(ZeroDivisionError):
        tau_apply(lambda s: s, 0.0)
    f = lambda s: s * s  # noqa: E731
    # tau(t^2) = ((t+1/2)^2 - (t-1/2)^2) / (2t) = 1
    assert tau_apply(f, 0.9) == pytest.approx(1.0)
    # tau* 1 = -e1 (a+t)(a-t) + (a+b)(a+g)(a+d)
    a, b, g, d = GENERIC.as_tuple()
    t = 0.6
    expected = -GENERIC.e1 * (a + t) * (a - t) + (a + b) * (a + g) * (a + d)
    assert tau_star_apply(lambda s: 1.0, GENERIC, t) == pytest.approx(expected, rel=1e-14)


def test_pk_relations():
    for t in (0.35, 1.9, 3.3):
        assert max(pk_identities(6, GENERIC, t).values()) < 1e-12


@pytest.mark.parametrize("n", range(7))
def test_difference_eigenvalue(n):
    for t in (0.4, 1.3, 2.6):
        assert abs(eigen_residual(n, GENERIC, t)) < 1e-12
    if n:
        # the alternative bracket n(n+e1) is off by n
        assert abs(eigen_residual(n, GENERIC, 1.3, shift=0, relative=False)) > 1e-3


@pytest.mark.parametrize("n", range(6))
def test_mu_and_tau_shift_relations(n):
    for t in (0.45, 1.7):
        assert max(mu_shift_identities(n, GENERIC, t).values()) < 1e-12
        assert tau_shift_identity(n, GENERIC, t) < 1e-12


def test_mu_apply_generic_pair_on_constant():
    # mu^(u,v) 1 = ((u+t)(v+t) - (u-t)(v-t)) / (2t) = u + v
    w = GENERIC
    assert mu_apply(("beta", "delta"), lambda s: 1.0, w, 0.7) == pytest.approx(w.beta + w.delta)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.2, 2.0), min_size=4, max_size=4), st.floats(0.0, 2.0), st.integers(0, 6))
def test_permutation_symmetry(p, t, n):
    w = WilsonParams(*p)
    vals = [permutation_covariant(n, w, t, perm) for perm in all_permutations()]
    ref = vals[0]
    assert max(abs(v - ref) for v in vals) <= 1e-10 * max(abs(ref), 1.0)


def test_all_permutations_count():
    assert len(set(all_permutations())) == 24


def test_racah_weight_start():
    w = WilsonParams.from_k(Params3(0.5, 0.9, 1.3), 4)
    assert racah_weight(0, w) == 1.0


@pytest.mark.parametrize("N", [1, 4, 10])
def test_racah_orthogonality(N):
    for k in (Params3(0.5, 0.9, 1.3), Params3(1.9, 0.2, 0.7)):
        w = WilsonParams.from_k(k, N)
        G = racah_gram(w, N, N)
        assert orthogonality_defect(G) < 1e-9
        assert np.all(np.diag(G) > 0)


def test_racah_gram_direct_sum_oracle():
    k = Params3(0.5, 0.9, 1.3)
    N = 3
    w = WilsonParams.from_k(k, N)
    G = racah_gram(w, N, N)
    direct = sum(racah_weight(q, w) * phi_n(1, w, w.t(q)) * phi_n(2, w, w.t(q)) for q in range(N + 1))
    assert G[1, 2] == pytest.approx(direct, abs=1e-14)


def test_gamma_form_weight_permutation_symmetry():
    w = WilsonParams(0.7, 1.1, 0.9, 1.3)
    t1, t2 = 0.4, 1.9

    def ratio(v):
        a, _ = log_norm_lambda_gamma_form(t1, v)
        b, _ = log_norm_lambda_gamma_form(t2, v)
        return a - b

    base = ratio(w)
    for perm in all_permutations():
        assert ratio(w.permuted(perm)) == pytest.approx(base, abs=1e-10)


@pytest.mark.parametrize("N", [2, 5, 8])
def test_three_term_recurrence_and_duality(N):
    k = Params3(0.6, 1.2, 0.9)
    for q in range(N + 1):
        assert recurrence_3term(N, q, k) < 1e-10
    assert check_duality(N, k).passed


def test_wilson_window_orthogonality():
    G, q_last = wilson_gram(WILSON_WINDOW, 5)
    assert orthogonality_defect(G) < 1e-8
    assert q_last < 1000
    # the diagonal entries are nonzero but all negative in this window
    assert np.all(np.diag(G) < 0)


def test_wilson_gram_mpmath_oracle():
    w = WILSON_WINDOW
    a, b, g, d = w.as_tuple()
    mpmath.mp.dps = 30

    def term(q, n1, n2):
        wt = mpmath.rf(2 * a, q) * mpmath.rf(a + 1, q) * mpmath.rf(a + b, q) * mpmath.rf(a + g, q) * mpmath.rf(a + d, q)
        wt /= mpmath.rf(a, q) * mpmath.rf(a - b + 1, q) * mpmath.rf(a - g + 1, q) * mpmath.rf(a - d + 1, q) * mpmath.factorial(q)
        t = q + a
        return wt * _mp_phi(n1, w, t) * _mp_phi(n2, w, t)

    G, _ = wilson_gram(w, 2)
    try:
        for n1, n2 in ((1, 1), (2, 2), (1, 2), (0, 2)):
            ref = float(mpmath.nsum(lambda q: term(int(q), n1, n2), [0, mpmath.inf]))
            scale = math.sqrt(abs(G[n1, n1] * G[n2, n2]))
            assert abs(G[n1, n2] - ref) < 1e-10 * scale
    finally:
        mpmath.mp.dps = 15


def test_divergent_window_rejected():
    with pytest.raises(DivergenceError):
        wilson_gram(WilsonParams(1.0, 1.0, 1.0, 1.0), 2)


def test_mu_alpha_beta_pole_on_lattice():
    w = WilsonParams.from_k(Params3(0.5, 0.9, 1.3), 3)
    with pytest.raises(PoleError):
        mu_shift_identities(3, w, 0.7)
