"""Matrix representations of the symmetry operators on an energy eigenspace.

On the level-``N`` eigenspace of H (dimension ``N + 1``) the operator L1 is
diagonal in the Psi basis and L2 is tridiagonal.  L3 follows from
``H = L1 + L2 + L3 + a1 + a2 + a3``.  Columns hold images: ``M[:, n]`` are
the coordinates of ``L Psi_{N-n,n}``.

Labels follow :mod:`racahlab.sphere`: ``L1`` is diagonal on Psi and pairs
with the potential parameters ``(a1, a2)``.  The structure relations are
stated for the triple ``(J1^2 + ..., J2^2 + ..., J3^2 + ...)``, i.e. for the
labels ``(L2, L3, L1)`` here, each operator paired with the ``a_j`` that is
*absent* from its potential.  :func:`structure_triple` performs that
relabelling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .report import CheckResult, timed
from .sphere import Params3, energy, l1_eigenvalue, l2_eigenvalue, rescale_factor

__all__ = [
    "OperatorMatrix",
    "l2_coefficients",
    "l1_matrix",
    "l2_matrix",
    "l3_matrix",
    "h_matrix",
    "commutator",
    "anticommutator",
    "symmetrizer",
    "structure_triple",
    "closure_residual",
    "casimir_residual",
    "verify_closure",
    "verify_casimir",
    "verify_spectrum",
    "verify_self_adjoint",
    "mu_eigenvalue",
    "lambda_eigenvalue",
]

BASIS_TAGS = ("psi", "psi_prime")

ANCHOR_CLOSURE = "[L_i,R]=4{L_i,L_k}-4{L_i,L_j}-(8+16a_j)L_j+(8+16a_k)L_k+8(a_j-a_k)"
ANCHOR_CASIMIR = "R^2 is contained in the algebra"


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense ``(N+1) x (N+1)`` matrix of an operator on the level-N eigenspace."""

    entries: np.ndarray
    basis_tag: str
    N: int

    def __post_init__(self):
        if self.basis_tag not in BASIS_TAGS:
            raise ValueError(f"basis_tag must be one of {BASIS_TAGS}")
        if self.entries.shape != (self.N + 1, self.N + 1):
            raise ValueError("matrix shape does not match N")

    @property
    def dim(self) -> int:
        return self.N + 1


def _check_level(N: int) -> None:
    if int(N) != N or N < 0:
        raise ParameterError(f"level N must be a nonnegative integer, got {N}")


def l2_coefficients(N: int, n: int, k: Params3, displayed_b: bool = False) -> tuple[float, float, float]:
    """``(A_n, B_n, C_n)`` in ``L2 Psi_{m,n} = A_n Psi_{m-1,n+1} + B_n Psi_{m,n} + C_n Psi_{m+1,n-1}``.

    The constant part of ``B_n`` is ``(k2^2 - k1^2 + k3^2)/2``; quadrature
    matrix elements confirm this.  ``displayed_b=True`` instead uses
    ``1/4 - k1^2 + k3^2/2``, which differs by ``(k1^2 + k2^2)/2 - 1/4`` and
    breaks the structure relations.
    """
    k1, k2, k3 = k.k
    K = k.ksum
    s = k1 + k2
    A = -4 * (N + k3 - n) * (N + n + K + 2) * (n + 1) * (n + s + 1) / ((2 * n + s + 2) * (2 * n + s + 1))
    const = 0.25 - k1**2 + 0.5 * k3**2 if displayed_b else 0.5 * (k2**2 - k1**2 + k3**2)
    B = (
        -(k1**2 - k2**2) * (k3**2 - (2 * N + K + 2) ** 2) / (2 * (2 * n + s + 2) * (2 * n + s))
        + 0.5 * (2 * n + s + 1) ** 2
        - 0.5 * (2 * N + 2 + K) ** 2
        + const
    )
    C = -4 * (N - n + 1) * (N + n + s + 1) * (n + k1) * (n + k2) / ((2 * n + s) * (2 * n + s + 1))
    return A, B, C


def _rescale_diag(N: int, k: Params3) -> np.ndarray:
    return np.array([rescale_factor(N, n, k) for n in range(N + 1)])


def _in_basis(M: np.ndarray, N: int, k: Params3, basis_tag: str) -> OperatorMatrix:
    if basis_tag == "psi_prime":
        # Psi'_n = r_n Psi_n  =>  M'[m, n] = M[m, n] r_n / r_m
        r = _rescale_diag(N, k)
        M = M * r[None, :] / r[:, None]
    return OperatorMatrix(M, basis_tag, N)


def mu_eigenvalue(n: int, k: Params3, form: str = "derived") -> float:
    """Eigenvalue of L1 on Psi_{N-n,n}.

    ``form="derived"`` expands the eigenvalue equation
    ``(L1 + 2k1k2 + 2k1 + 2k2 + 3/2)/4 Psi = -n(n+k1+k2+1) Psi``;
    ``form="displayed"`` is ``-(2n+1)^2 - 2(2n+1)(k1+k2) + 2k1k2 - 1/2``, which
    carries the opposite sign on the ``k1 k2`` term.
    """
    if form == "derived":
        return l1_eigenvalue(n, k)
    if form == "displayed":
        k1, k2, _ = k.k
        return -((2 * n + 1) ** 2) - 2 * (2 * n + 1) * (k1 + k2) + 2 * k1 * k2 - 0.5
    raise ValueError(f"unknown form {form!r}")


def lambda_eigenvalue(q: int, k: Params3, form: str = "derived") -> float:
    """Eigenvalue of L2 on Lambda_{N-q,q}; forms as in :func:`mu_eigenvalue`."""
    if form == "derived":
        return l2_eigenvalue(q, k)
    return mu_eigenvalue(q, Params3(k.k2, k.k3, k.k1), form)


def l1_matrix(N: int, k: Params3, basis_tag: str = "psi") -> OperatorMatrix:
    _check_level(N)
    M = np.diag([l1_eigenvalue(n, k) for n in range(N + 1)])
    return OperatorMatrix(M, basis_tag, N)


def l2_matrix(N: int, k: Params3, basis_tag: str = "psi", displayed_b: bool = False) -> OperatorMatrix:
    _check_level(N)
    M = np.zeros((N + 1, N + 1))
    for n in range(N + 1):
        A, B, C = l2_coefficients(N, n, k, displayed_b)
        M[n, n] = B
        if n + 1 <= N:
            M[n + 1, n] = A
        if n >= 1:
            M[n - 1, n] = C
    return _in_basis(M, N, k, basis_tag)


def h_matrix(N: int, k: Params3, basis_tag: str = "psi") -> OperatorMatrix:
    _check_level(N)
    return OperatorMatrix(energy(N, k) * np.eye(N + 1), basis_tag, N)


def l3_matrix(N: int, k: Params3, basis_tag: str = "psi", displayed_b: bool = False) -> OperatorMatrix:
    """``L3 = E_N I - L1 - L2 - (a1 + a2 + a3) I``."""
    L1 = l1_matrix(N, k, basis_tag).entries
    L2 = l2_matrix(N, k, basis_tag, displayed_b).entries
    M = (energy(N, k) - sum(k.a)) * np.eye(N + 1) - L1 - L2
    return OperatorMatrix(M, basis_tag, N)


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def anticommutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B + B @ A


def symmetrizer(A: np.ndarray, B: np.ndarray, C: np.ndarray, normalized: bool = False) -> np.ndarray:
    """Sum of the six ordered products; divided by 6 if ``normalized``."""
    out = sum(X @ Y @ Z for X, Y, Z in itertools.permutations((A, B, C)))
    return out / 6 if normalized else out


def structure_triple(N: int, k: Params3, displayed_b: bool = False, a=None):
    """Operators and parameters in the labelling of the structure relations.

    Returns ``([M1, M2, M3], (a1, a2, a3))`` with ``M_j`` the matrix of the
    operator whose kinetic part is ``J_j^2``.  ``a`` overrides the potential
    parameters used in the relations (for sensitivity tests).
    """
    L1 = l1_matrix(N, k).entries
    L2 = l2_matrix(N, k, displayed_b=displayed_b).entries
    L3 = l3_matrix(N, k, displayed_b=displayed_b).entries
    return [L2, L3, L1], tuple(k.a if a is None else a)


def _scaled_residual(lhs: np.ndarray, terms: list[np.ndarray]) -> float:
    # Relative to the largest individual term: at N = 0 the right-hand sides
    # cancel to rounding level while their terms stay O(10^3).
    diff = lhs - sum(terms)
    scale = max([np.max(np.abs(t)) for t in terms] + [np.max(np.abs(lhs)), 1e-300])
    return float(np.max(np.abs(diff)) / scale)


CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def closure_residual(N: int, k: Params3, displayed_b: bool = False, a=None) -> dict[str, float]:
    """Scaled residual of the ``[L_i, R]`` relation for each cyclic ``(i, j, k)``.

    Also reports how far ``[L1,L2]``, ``[L2,L3]``, ``[L3,L1]`` are from a
    common ``R``.
    """
    L, av = structure_triple(N, k, displayed_b, a)
    I = np.eye(N + 1)
    R = commutator(L[0], L[1])
    out = {}
    for i, j, kk in CYCLIC:
        terms = [
            4 * anticommutator(L[i], L[kk]),
            -4 * anticommutator(L[i], L[j]),
            -(8 + 16 * av[j]) * L[j],
            (8 + 16 * av[kk]) * L[kk],
            8 * (av[j] - av[kk]) * I,
        ]
        out[f"({i + 1},{j + 1},{kk + 1})"] = _scaled_residual(commutator(L[i], R), terms)
    rscale = max(np.max(np.abs(R)), 1e-300) if N else 1.0
    out["R_cyclic"] = float(
        max(np.max(np.abs(R - commutator(L[1], L[2]))), np.max(np.abs(R - commutator(L[2], L[0])))) / rscale
    )
    return out


def casimir_terms(N: int, k: Params3, normalized_symmetrizer: bool = False, displayed_b: bool = False, a=None):
    """``(R^2, [right-hand-side terms])`` of the cubic relation."""
    L, (a1, a2, a3) = structure_triple(N, k, displayed_b, a)
    av = (a1, a2, a3)
    I = np.eye(N + 1)
    R = commutator(L[0], L[1])
    terms = [8 / 3 * symmetrizer(*L, normalized=normalized_symmetrizer)]
    terms += [-(16 * av[j] + 12) * L[j] @ L[j] for j in range(3)]
    terms += [52 / 3 * (anticommutator(L[0], L[1]) + anticommutator(L[1], L[2]) + anticommutator(L[2], L[0]))]
    terms += [(16 + 176 * av[j]) / 3 * L[j] for j in range(3)]
    terms += [(32 / 3 * (a1 + a2 + a3) + 48 * (a1 * a2 + a2 * a3 + a3 * a1) + 64 * a1 * a2 * a3) * I]
    return R @ R, terms


def casimir_residual(N: int, k: Params3, normalized_symmetrizer: bool = False, displayed_b: bool = False, a=None) -> float:
    lhs, terms = casimir_terms(N, k, normalized_symmetrizer, displayed_b, a)
    return _scaled_residual(lhs, terms)


def verify_closure(N: int, k: Params3, tol: float = 1e-8, displayed_b: bool = False) -> CheckResult:
    with timed() as clock:
        res = closure_residual(N, k, displayed_b)
    out = CheckResult.from_residual(
        f"closure N={N} k={k.k}", ANCHOR_CLOSURE, tol, max(res.values()), cases=res
    )
    out.wall_time = clock["seconds"]
    return out


def verify_casimir(N: int, k: Params3, tol: float = 1e-8, normalized_symmetrizer: bool = False) -> CheckResult:
    """Check the cubic relation for ``R^2``.

    The symmetrizer is the plain sum over six orderings, matching
    ``{A,B} = AB + BA``; the 1/6-normalized variant fails for N >= 1 and is
    reported alongside for the record.
    """
    with timed() as clock:
        res = casimir_residual(N, k, normalized_symmetrizer)
        alt = casimir_residual(N, k, not normalized_symmetrizer)
    out = CheckResult.from_residual(
        f"casimir N={N} k={k.k}",
        ANCHOR_CASIMIR,
        tol,
        res,
        symmetrizer="1/6 sum" if normalized_symmetrizer else "sum of 6 orderings",
        other_convention_residual=alt,
    )
    out.wall_time = clock["seconds"]
    return out


def verify_spectrum(N: int, k: Params3, tol: float = 1e-8) -> CheckResult:
    """Sorted eigenvalues of the L2 matrix against the Lambda eigenvalues."""
    M = l2_matrix(N, k).entries
    ev = np.sort(np.linalg.eigvals(M).real)
    target = np.sort([l2_eigenvalue(q, k) for q in range(N + 1)])
    res = float(np.max(np.abs(ev - target)) / max(np.max(np.abs(target)), 1.0))
    return CheckResult.from_residual(f"L2 spectrum N={N}", "-q(q+k_2+k_3+1)", tol, res)


def verify_self_adjoint(N: int, k: Params3, tol: float = 1e-10) -> CheckResult:
    """L2 in the orthonormalized Psi basis must be symmetric."""
    from .sphere import norm_psi_sq

    nrm = np.sqrt([norm_psi_sq(N, n, k) for n in range(N + 1)])
    M = l2_matrix(N, k).entries
    S = M * nrm[:, None] / nrm[None, :]
    res = float(np.max(np.abs(S - S.T)) / max(np.max(np.abs(S)), 1e-300))
    return CheckResult.from_residual(f"L2 self-adjoint N={N}", "self-adjoint properties of L_1,L_2", tol, res)
