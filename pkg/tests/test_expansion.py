import math

import numpy as np
import pytest

from racahlab.errors import ParameterError
from racahlab.expansion import (
    CSV_COLUMNS,
    build_grid,
    c_closed_form,
    coefficient_matrix,
    coefficient_rows,
    default_grid_order,
    expansion_coeff,
    inner_product,
    resummation_residual,
    rows_to_csv,
    rows_to_json,
    scale_constant_c,
    verify_orthogonal_matrix,
    xi_closed_form,
    xi_quadrature,
)
from racahlab.sphere import Params3, norm_psi_prime_sq, norm_psi_sq, psi

K_DRAWS = [Params3(0.5, 0.8, 1.2), Params3(1.7, 0.3, 0.9), Params3(0.25, 1.9, 0.6)]


def test_grid_integrates_its_own_profile():
    grid = build_grid(K_DRAWS[0], 24)
    assert np.sum(grid.weights) == pytest.approx(grid.beta_integral(), rel=1e-13)
    assert grid.nodes.shape == (24 * 24, 2)


def test_ground_state_norm():
    for k in K_DRAWS:
        grid = build_grid(k)
        v = psi(0, 0, k, grid.x, grid.y)
        assert inner_product(v, v, grid) == pytest.approx(norm_psi_sq(0, 0, k), rel=1e-13)


def test_env_var_sets_grid_order(monkeypatch):
    monkeypatch.setenv("RACAHLAB_GRID_ORDER", "20")
    assert default_grid_order() == 20
    assert build_grid(K_DRAWS[0]).order == 20
    monkeypatch.setenv("RACAHLAB_GRID_ORDER", "x")
    with pytest.raises(ParameterError):
        default_grid_order()
    monkeypatch.delenv("RACAHLAB_GRID_ORDER")
    assert default_grid_order() == 48


@pytest.mark.parametrize("k", K_DRAWS, ids=str)
def test_closed_form_matches_quadrature(k):
    grid = build_grid(k)
    for N in range(7):
        Xi = xi_quadrature(N, k, grid)
        for n in range(N + 1):
            for q in range(N + 1):
                cf = xi_closed_form(N, n, q, k)
                assert Xi[n, q] == pytest.approx(cf, rel=1e-6)


def test_displayed_prefactor_agrees_only_at_ground_level():
    k = K_DRAWS[0]
    assert xi_closed_form(0, 0, 0, k, form="displayed") == pytest.approx(xi_closed_form(0, 0, 0, k))
    K = k.ksum
    for N in (1, 2, 3):
        ratio = xi_closed_form(N, 1, 0, k, form="displayed") / xi_closed_form(N, 1, 0, k)
        assert ratio == pytest.approx((-1) ** N * ((2 * N + K + 2) / (K + 2)) ** 2)


def test_scale_constant():
    for k in K_DRAWS:
        c0, err = scale_constant_c(k)
        assert err < 1e-12
        assert c0 == pytest.approx(c_closed_form(k), rel=1e-11)
        c1, _ = scale_constant_c(k, at=(1, 1, 1))
        assert c1 == pytest.approx(c0, rel=1e-10)
    # c depends on k1 + k2 + k3 only
    k = K_DRAWS[1]
    assert c_closed_form(k) == c_closed_form(k.swap13())


@pytest.mark.parametrize("k", K_DRAWS, ids=str)
def test_coefficient_matrix_orthogonal(k):
    grid = build_grid(k)
    for N in range(7):
        res = verify_orthogonal_matrix(N, k, grid)
        assert res.passed, res.details


def test_expansion_coeff_with_refinement_check():
    k = K_DRAWS[0]
    R = coefficient_matrix(3, k)
    assert expansion_coeff(3, 1, 2, k, check=True) == pytest.approx(R[1, 2], rel=1e-12)
    assert R[1, 2] * norm_psi_prime_sq(3, 1, k) == pytest.approx(xi_closed_form(3, 1, 2, k), rel=1e-10)


def test_resummation(rng):
    k = K_DRAWS[2]
    x, y = rng.uniform(-0.9, 0.9, 30), rng.uniform(-0.9, 0.9, 30)
    for q in range(5):
        assert resummation_residual(4, q, k, x, y) < 1e-9


def test_index_bounds():
    with pytest.raises(ParameterError):
        xi_closed_form(2, 3, 0, K_DRAWS[0])


def test_table_export():
    rows = coefficient_rows(3, K_DRAWS[0])
    assert len(rows) == 16
    text = rows_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0].split(",")[: len(CSV_COLUMNS)] == list(CSV_COLUMNS)
    assert len(lines) == 17
    # repr formatting survives a round trip exactly
    assert float(lines[1].split(",")[6]) == rows[0]["value"]
    assert rows_to_json(rows).startswith("[")
    R_rows = coefficient_rows(2, K_DRAWS[0], quantity="R")
    assert R_rows[0]["value"] == pytest.approx(coefficient_matrix(2, K_DRAWS[0])[0, 0], rel=1e-12)
