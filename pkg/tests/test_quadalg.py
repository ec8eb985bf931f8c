import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racahlab.errors import ParameterError
from racahlab.quadalg import (
    OperatorMatrix,
    casimir_residual,
    closure_residual,
    h_matrix,
    l1_matrix,
    l2_matrix,
    l3_matrix,
    lambda_eigenvalue,
    mu_eigenvalue,
    symmetrizer,
    verify_casimir,
    verify_closure,
    verify_self_adjoint,
    verify_spectrum,
)
from racahlab.sphere import Params3, apply_diffop, l2_eigenvalue, psi, psi_field

kvals = st.floats(min_value=0.05, max_value=2.0)


@settings(max_examples=25, deadline=None)
@given(kvals, kvals, kvals, st.integers(0, 7))
def test_closure_and_casimir_random(k1, k2, k3, N):
    k = Params3(k1, k2, k3)
    assert max(closure_residual(N, k).values()) < 1e-8
    assert casimir_residual(N, k) < 1e-8


def test_l2_matrix_matches_pointwise_action(k_generic, rng):
    # oracle: apply the differential operator to Psi and re-expand
    x, y = rng.uniform(-0.8, 0.8, 12), rng.uniform(-0.8, 0.8, 12)
    N = 4
    M = l2_matrix(N, k_generic).entries
    for n in range(N + 1):
        lhs = apply_diffop("L2", k_generic, psi_field(N, n, k_generic), x, y)
        rhs = sum(M[m, n] * psi(N, m, k_generic, x, y) for m in range(N + 1))
        assert np.max(np.abs(lhs - rhs)) < 1e-6 * np.max(np.abs(lhs))


def test_displayed_b_constant_fails_pointwise(k_generic, rng):
    x, y = rng.uniform(-0.8, 0.8, 12), rng.uniform(-0.8, 0.8, 12)
    M = l2_matrix(2, k_generic, displayed_b=True).entries
    lhs = apply_diffop("L2", k_generic, psi_field(2, 1, k_generic), x, y)
    rhs = sum(M[m, 1] * psi(2, m, k_generic, x, y) for m in range(3))
    assert np.max(np.abs(lhs - rhs)) > 1e-3 * np.max(np.abs(lhs))
    assert casimir_residual(3, k_generic, displayed_b=True) > 1e-6


def test_spectrum_and_self_adjoint(k_generic):
    for N in range(7):
        assert verify_spectrum(N, k_generic).passed
        assert verify_self_adjoint(N, k_generic).passed


def test_hamiltonian_decomposition(k_generic):
    N = 3
    total = l1_matrix(N, k_generic).entries + l2_matrix(N, k_generic).entries + l3_matrix(N, k_generic).entries
    total += sum(k_generic.a) * np.eye(N + 1)
    assert np.allclose(total, h_matrix(N, k_generic).entries, atol=1e-10)


def test_psi_prime_basis_similarity(k_generic):
    N = 5
    a = np.sort(np.linalg.eigvals(l2_matrix(N, k_generic, "psi_prime").entries).real)
    b = np.sort([l2_eigenvalue(q, k_generic) for q in range(N + 1)])
    assert np.allclose(a, b, rtol=1e-10)


def test_normalized_symmetrizer_fails(k_generic):
    assert casimir_residual(3, k_generic, normalized_symmetrizer=True) > 1e-2
    res = verify_casimir(3, k_generic)
    assert res.passed
    assert res.details["other_convention_residual"] > 1e-2


def test_symmetrizer_six_terms():
    A, B, C = (np.diag([1.0, 2.0]), np.array([[0, 1.0], [1, 0]]), np.eye(2))
    assert np.allclose(symmetrizer(A, B, C), 3 * (A @ B + B @ A))
    assert np.allclose(symmetrizer(A, B, C, normalized=True), (A @ B + B @ A) / 2)


def test_sensitivity_to_potential_parameters():
    k = Params3(0.7, 1.1, 0.4)
    a = list(k.a)
    a[0] += 1e-3
    assert casimir_residual(3, k, a=a) > 1e-4
    assert max(closure_residual(3, k, a=a).values()) > 1e-5


def test_ground_level_cancellation_is_scaled(k_generic):
    # at N = 0 both sides of the closure relation vanish up to rounding
    res = closure_residual(0, k_generic)
    assert max(res.values()) < 1e-12


def test_mu_and_lambda_forms(k_generic):
    assert mu_eigenvalue(0, k_generic, "derived") != mu_eigenvalue(0, k_generic, "displayed")
    k1, k2, _ = k_generic.k
    for n in range(5):
        # the two forms differ by exactly 4 k1 k2
        diff = mu_eigenvalue(n, k_generic, "displayed") - mu_eigenvalue(n, k_generic, "derived")
        assert diff == pytest.approx(4 * k1 * k2)
    assert lambda_eigenvalue(2, k_generic) == l2_eigenvalue(2, k_generic)
    with pytest.raises(ValueError):
        mu_eigenvalue(1, k_generic, "other")


def test_verify_wrappers(k_generic):
    r = verify_closure(4, k_generic)
    assert r.passed and set(r.details["cases"]) >= {"(1,2,3)", "(2,3,1)", "(3,1,2)"}


def test_bad_inputs(k_generic):
    with pytest.raises(ParameterError):
        l2_matrix(-1, k_generic)
    with pytest.raises(ValueError):
        OperatorMatrix(np.eye(2), "lambda", 1)
    with pytest.raises(ValueError):
        OperatorMatrix(np.eye(3), "psi", 1)
