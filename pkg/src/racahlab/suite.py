"""The acceptance checks, one function per criterion.

Every check draws its random parameters from
``numpy.random.default_rng([seed, criterion])`` (PCG64 seeded through
``SeedSequence``), so a panel depends only on the seed and the criterion
number.  The CLI and the acceptance tests both call :func:`run_all`.
"""

from __future__ import annotations

import itertools

import numpy as np
from numpy.polynomial import chebyshev

from .expansion import ANCHOR_XI, build_grid, coefficient_rows, verify_orthogonal_matrix
from .quadalg import ANCHOR_CASIMIR, ANCHOR_CLOSURE, closure_residual, casimir_residual, mu_eigenvalue
from .report import CheckResult, combine, timed
from .sphere import (
    Field,
    Params3,
    apply_diffop,
    apply_T,
    apply_Tstar,
    apply_U_pmmp,
    apply_U_ppmm,
    apply_V,
    diffop_field,
    psi,
    psi_field,
)
from .wilson import (
    WILSON_WINDOW,
    WilsonParams,
    all_permutations,
    eigen_residual,
    mu_shift_identities,
    orthogonality_defect,
    permutation_covariant,
    phi_n,
    pk_identities,
    racah_gram,
    tau_shift_identity,
    wilson_gram,
    wk_residual,
)
from .wilsonfn import (
    in_convergence_window,
    mixing_coefficient,
    phi_residual,
    psi_residual,
    q_shift_residuals,
    wilson_3term_residual,
    wilson_eigen_residual,
    wilson_function,
    wilson_murec_residual,
)

__all__ = ["DEFAULT_SEED", "CRITERIA", "panel_rng", "k_panel", "wilsonfn_panel", "run_criterion", "run_all"]

DEFAULT_SEED = 20240607


def panel_rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(criterion)])


def k_panel(rng: np.random.Generator, size: int, low: float = 0.0, high: float = 2.0) -> list[Params3]:
    """``size`` draws of ``(k1, k2, k3)`` uniform on ``(low, high]``."""
    return [Params3(*(high - rng.uniform(0.0, high - low, 3))) for _ in range(size)]


def _finish(res: CheckResult, clock: dict, name: str) -> CheckResult:
    res.name = name
    res.wall_time = clock["seconds"]
    return res


# -- 1, 2: quadratic algebra ----------------------------------------------------------


def criterion_1(seed: int = DEFAULT_SEED) -> CheckResult:
    """Closure relation for N in {0,2,4,6}, 5 random k, all three cyclic assignments."""
    with timed() as clock:
        worst, cases = 0.0, {}
        for k in k_panel(panel_rng(seed, 1), 5):
            for N in (0, 2, 4, 6):
                r = max(closure_residual(N, k).values())
                cases[f"N={N} k={k.k}"] = r
                worst = max(worst, r)
        res = CheckResult.from_residual("", ANCHOR_CLOSURE, 1e-8, worst, cases=cases, runtime_limit=5.0)
    res = _finish(res, clock, "1 closure")
    res.passed = res.passed and res.wall_time < 5.0
    return res


def criterion_2(seed: int = DEFAULT_SEED) -> CheckResult:
    """Cubic relation on the panel of criterion 1 (sum over the six orderings)."""
    with timed() as clock:
        worst, alt, cases = 0.0, 0.0, {}
        for k in k_panel(panel_rng(seed, 1), 5):
            for N in (0, 2, 4, 6):
                r = casimir_residual(N, k)
                cases[f"N={N} k={k.k}"] = r
                worst = max(worst, r)
                alt = max(alt, casimir_residual(N, k, normalized_symmetrizer=True))
        res = CheckResult.from_residual(
            "", ANCHOR_CASIMIR, 1e-8, worst, cases=cases,
            symmetrizer="sum of 6 orderings", normalized_symmetrizer_residual=alt,
        )
    res = _finish(res, clock, "2 casimir")
    res.passed = res.passed and res.wall_time < 5.0
    return res


# -- 3: interbasis coefficients ------------------------------------------------------


def criterion_3(seed: int = DEFAULT_SEED, grid_order: int | None = None) -> CheckResult:
    """Quadrature against the closed form, and orthogonality of the coefficient matrix."""
    with timed() as clock:
        xi_err, orth, cases = 0.0, 0.0, {}
        for k in k_panel(panel_rng(seed, 3), 3, low=0.2):
            grid = build_grid(k, grid_order)
            for N in range(7):
                rows = coefficient_rows(N, k, grid)
                e = max(r["rel_error"] for r in rows)
                o = verify_orthogonal_matrix(N, k, grid).residual
                cases[f"N={N} k={k.k}"] = {"xi_rel_error": e, "orthogonality": o}
                xi_err, orth = max(xi_err, e), max(orth, o)
        parts = [
            CheckResult.from_residual("closed form", ANCHOR_XI, 1e-6, xi_err),
            CheckResult.from_residual("orthogonal", "is orthogonal.  We have  identities", 1e-8, orth),
        ]
    res = combine("3 interbasis coefficients", ANCHOR_XI, parts)
    res.details["cases"] = cases
    res.wall_time = clock["seconds"]
    res.passed = res.passed and res.wall_time < 60.0
    return res


# -- 4, 5: Racah polynomials ------------------------------------------------------------


def criterion_4(seed: int = DEFAULT_SEED) -> CheckResult:
    """Weighted lattice sum gives a diagonal Gram matrix, N <= 10, 10 draws."""
    with timed() as clock:
        worst, cases = 0.0, {}
        for k in k_panel(panel_rng(seed, 4), 10):
            for N in range(11):
                w = WilsonParams.from_k(k, N)
                d = orthogonality_defect(racah_gram(w, N, N))
                cases[f"N={N} k={k.k}"] = d
                worst = max(worst, d)
        res = CheckResult.from_residual("", "precisely the measure for orthogonality", 1e-9, worst, cases=cases)
    res = _finish(res, clock, "4 racah orthogonality")
    res.passed = res.passed and res.wall_time < 5.0
    return res


def criterion_5(seed: int = DEFAULT_SEED) -> CheckResult:
    """Second-order difference equation for integer n <= 8, plus the P_k relations for k <= 6."""
    rng = panel_rng(seed, 5)
    with timed() as clock:
        eig = pk = 0.0
        for k in k_panel(rng, 5):
            w = WilsonParams.from_k(k, 8)
            generic = list(rng.uniform(0.1, 3.0, 3))
            for t in [w.t(q) for q in range(9)] + generic:
                for n in range(9):
                    eig = max(eig, abs(eigen_residual(n, w, t)))
                    pk = max(pk, wk_residual(n, w, t))
            # at lattice points (alpha - t)_k vanishes for k > q and the P_k
            # relations reduce to 0 = 0 up to rounding
            for t in generic:
                pk = max(pk, *pk_identities(6, w, t).values())
        parts = [
            CheckResult.from_residual("tau* tau eigenvalue", "a 2nd order difference equation for $\\Xi'$", 1e-10, eig),
            CheckResult.from_residual("P_k relations", "tau P_k, tau* P_k, w_k recurrence", 1e-10, pk),
        ]
    res = combine("5 difference eigenvalue", "a 2nd order difference equation for $\\Xi'$", parts)
    res.wall_time = clock["seconds"]
    return res


# -- 6: intertwining operators -------------------------------------------------------------


def _cheb_field(i: int, j: int) -> Field:
    ci, cj = np.eye(i + 1)[i], np.eye(j + 1)[j]
    return Field(lambda x, y: chebyshev.chebval(x, ci) * chebyshev.chebval(y, cj))


def _rel_max(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), np.max(np.abs(b)), 1.0))


def intertwining_residuals(k: Params3, xs, ys, degrees=4, op: str = "H") -> dict[str, float]:
    """``max |X op f - op' X f|`` (relative) over Chebyshev test fields of degree <= ``degrees``."""
    maps = {
        "T": (lambda g: apply_T(k, g), k.shifted(-1, -1, 0)),
        "T*": (lambda g: apply_Tstar(k, g), k.shifted(1, 1, 0)),
        "V": (lambda g: apply_V(k, g), k.shifted(0, 0, 1)),
    }
    out = {name: 0.0 for name in maps}
    for i, j in itertools.product(range(degrees + 1), repeat=2):
        f = _cheb_field(i, j)
        Hf = diffop_field(op, k, f)
        for name, (X, kk) in maps.items():
            lhs = X(Hf)(xs, ys)
            rhs = apply_diffop(op, kk, X(f), xs, ys)
            out[name] = max(out[name], _rel_max(lhs, rhs))
    return out


def basis_action_residuals(k: Params3, xs, ys, Nmax: int = 3) -> dict[str, float]:
    """T, T*, the two U operators and V on Psi against their documented images."""
    km, kp, k3p = k.shifted(-1, -1, 0), k.shifted(1, 1, 0), k.shifted(0, 0, 1)
    out = dict.fromkeys(("T", "T*", "U(+,+,-,-)", "U(+,-,-,+)", "V"), 0.0)
    zero = np.zeros_like(xs)
    for N in range(Nmax + 1):
        for n in range(N + 1):
            m = N - n
            f = psi_field(N, n, k)
            u1 = -(n + N + k.k1 + k.k2 + 1) * psi(N - 1, n, k3p, xs, ys) if m else zero
            u2 = (n + N + k.ksum + 2) * psi(N, n, k3p, xs, ys)
            ts = -(k.k1 + k.k2 + n + 1) * psi(N - 1, n - 1, kp, xs, ys) if n else zero
            pairs = {
                "T": (apply_T(k, f)(xs, ys), -(n + 1) * psi(N + 1, n + 1, km, xs, ys)),
                "T*": (apply_Tstar(k, f)(xs, ys), ts),
                "U(+,+,-,-)": (apply_U_ppmm(k, N, f)(xs, ys), u1),
                "U(+,-,-,+)": (apply_U_pmmp(k, N, f)(xs, ys), u2),
                "V": (apply_V(k, f)(xs, ys), u1 + u2),
            }
            for name, (a, b) in pairs.items():
                out[name] = max(out[name], _rel_max(a, b))
    return out


def criterion_6(seed: int = DEFAULT_SEED) -> CheckResult:
    """Differential intertwiners (1e-5) and difference-operator shift relations (1e-10).

    The differential part requires ``X H f = H' X f`` for X in {T, T*, V}.
    T and T* satisfy it.  V sends level N to levels N-1 and N of the
    shifted system, which have different energies, so its residual is O(1);
    V intertwines L1 instead, and its basis action holds.  Both facts are
    reported in the details.
    """
    rng = panel_rng(seed, 6)
    with timed() as clock:
        k = k_panel(rng, 1, low=1.1, high=2.0)[0]
        xs, ys = rng.uniform(-0.7, 0.7, 12), rng.uniform(-0.7, 0.7, 12)
        inter = intertwining_residuals(k, xs, ys)
        v_l1 = intertwining_residuals(k, xs, ys, degrees=2, op="L1")["V"]
        basis = basis_action_residuals(k, xs, ys)
        diff = {}
        # generic parameters: on a Racah lattice the mu(alpha,beta) source has
        # alpha+beta = 1-N and only degrees below N exist
        for _ in range(4):
            w = WilsonParams(*rng.uniform(0.6, 2.0, 4))
            for t in rng.uniform(0.1, 3.0, 3):
                for n in range(7):
                        rows = dict(mu_shift_identities(n, w, t))
                        rows["tau"] = tau_shift_identity(n, w, t)
                        for key, v in rows.items():
                            diff[key] = max(diff.get(key, 0.0), v)
        parts = [
            CheckResult.from_residual(f"{name} H-intertwining", "X H = H' X", 1e-5, r)
            for name, r in inter.items()
        ]
        parts.append(CheckResult.from_residual("basis actions", "defined  intrinsically", 1e-5, max(basis.values())))
        parts.append(
            CheckResult.from_residual("difference shift relations", "$(\\alpha+\\beta)\\Phi_n$", 1e-10, max(diff.values()))
        )
    res = combine("6 intertwining recurrences", "defined  intrinsically", parts)
    res.details.update(
        intertwining_H=inter, V_L1_intertwining=v_l1, basis_actions=basis, difference_relations=diff, k=k.k
    )
    res.wall_time = clock["seconds"]
    return res


# -- 7: permutation symmetry ------------------------------------------------------------------


def criterion_7(seed: int = DEFAULT_SEED) -> CheckResult:
    """``(a+b)_n (a+g)_n (a+d)_n Phi_n`` is the same for all 24 orderings, n <= 6."""
    rng = panel_rng(seed, 7)
    with timed() as clock:
        worst = 0.0
        for _ in range(3):
            w = WilsonParams(*rng.uniform(0.2, 2.0, 4))
            for t in rng.uniform(0.0, 2.0, 3):
                for n in range(7):
                    vals = np.array([permutation_covariant(n, w, t, p) for p in all_permutations()])
                    worst = max(worst, float(np.ptp(vals) / max(np.max(np.abs(vals)), 1.0)))
        res = CheckResult.from_residual("", "is invariant under all permutations", 1e-10, worst)
    return _finish(res, clock, "7 permutation symmetry")


# -- 8: Wilson functions ---------------------------------------------------------------------


def wilsonfn_panel(rng: np.random.Generator, size: int = 30):
    """Draws ``(w, n, t)`` with non-integer ``n``.

    ``w`` and its murec source ``(a+1/2, b+1/2, g-1/2, d-1/2)`` both lie in the
    convergence window; ``n = n' + c`` with ``n'`` in -2..2 and ``c`` in
    [0.1, 0.9]; ``t`` in [0.1, 1.2].  Draws outside the window are rejected.
    """
    out = []
    while len(out) < size:
        a, b = rng.uniform(0.1, 0.9), rng.uniform(-0.3, 0.5)
        g, d = rng.uniform(0.6, 1.6, 2)
        w = WilsonParams(a, b, g, d)
        if not (in_convergence_window(w) and in_convergence_window(w.shifted(0.5, 0.5, -0.5, -0.5))):
            continue
        n = int(rng.integers(-2, 3)) + rng.uniform(0.1, 0.9)
        out.append((w, float(n), float(rng.uniform(0.1, 1.2))))
    return out


def limit_residual(m: int, w: WilsonParams, t: float, eps=(1e-3, 1e-4)) -> float:
    """Extrapolate ``~Phi_{m+eps}`` to eps = 0 and compare with ``Phi_m``, relative.

    Symmetric averages ``(~Phi_{m+e} + ~Phi_{m-e})/2`` remove the odd powers
    of ``e``; one Richardson step in ``e^2`` over the two values of ``e``
    removes the quadratic term.  A one-sided linear extrapolation leaves
    ``c2 e1 e2``, which exceeds 1e-5 for some draws.
    """
    ref = phi_n(m, w, t)
    e1, e2 = eps
    avg = [(wilson_function(m + e, w, t, guard=None) + wilson_function(m - e, w, t, guard=None)) / 2 for e in eps]
    r = (e1 / e2) ** 2
    extrap = (r * avg[1] - avg[0]) / (r - 1)
    return abs(extrap - ref) / max(abs(ref), 1.0)


def criterion_8(seed: int = DEFAULT_SEED) -> CheckResult:
    rng = panel_rng(seed, 8)
    with timed() as clock:
        r = dict.fromkeys(("phi", "psi", "eigen", "murec", "3-term", "limit", "q-basis"), 0.0)
        for w, n, t in wilsonfn_panel(rng):
            r["phi"] = max(r["phi"], abs(phi_residual(n, w, t)))
            r["psi"] = max(r["psi"], abs(psi_residual(n, w, t)))
            r["eigen"] = max(r["eigen"], wilson_eigen_residual(n, w, t))
            r["murec"] = max(r["murec"], wilson_murec_residual(n, w, t))
        for w, n, t in wilsonfn_panel(rng, 5):
            r["3-term"] = max(r["3-term"], wilson_3term_residual(n, w, t))
            r["limit"] = max(r["limit"], limit_residual(2, w, t))
            r["q-basis"] = max(r["q-basis"], *q_shift_residuals(4, w, t).values())
        parts = [
            CheckResult.from_residual("phi residual identity", "making use of the Stirling formula", 1e-6, r["phi"]),
            CheckResult.from_residual("psi residual identity", "doesn't satisfy the eigenvalue equation", 1e-6, r["psi"]),
            CheckResult.from_residual("eigenvalue", "do satisfy the eigenvalue equation", 1e-7, r["eigen"]),
            CheckResult.from_residual("murec", "satisfies all of the recurrence formulas", 1e-7, r["murec"]),
            CheckResult.from_residual("3-term", "must also satisfy the 3-term recurrence formula", 1e-6, r["3-term"]),
            CheckResult.from_residual("integer limit", "pole at the negative integers", 1e-5, r["limit"]),
            CheckResult.from_residual("Q-basis", "Now consider the functions with relations", 1e-11, r["q-basis"]),
        ]
    res = combine("8 wilson functions", "do satisfy the eigenvalue equation", parts)
    res.details["residuals"] = r
    res.wall_time = clock["seconds"]
    res.passed = res.passed and res.wall_time < 30.0
    return res


# -- 9: Wilson orthogonality -------------------------------------------------------------------


def criterion_9(seed: int = DEFAULT_SEED) -> CheckResult:
    """Truncated infinite lattice sum at the documented window, n1, n2 <= 5."""
    with timed() as clock:
        G, q_last = wilson_gram(WILSON_WINDOW, 5)
        d = orthogonality_defect(G)
        res = CheckResult.from_residual(
            "", "equivalent to a ${}_5F_4$ identity", 1e-8, d,
            window=WILSON_WINDOW.as_tuple(), terms=q_last + 1, h_n=[float(x) for x in np.diag(G)],
        )
    return _finish(res, clock, "9 wilson orthogonality")


# -- 10: disambiguation -----------------------------------------------------------------------


def resolve_mu_sign(seed: int = DEFAULT_SEED) -> dict:
    """L1 eigenvalue on Psi by finite differences against both eigenvalue forms."""
    rng = panel_rng(seed, 10)
    k = k_panel(rng, 1, low=0.5)[0]
    x, y = rng.uniform(-0.7, 0.7, 10), rng.uniform(-0.7, 0.7, 10)
    err = {"derived": 0.0, "displayed": 0.0}
    for N in range(5):
        for n in range(N + 1):
            f = psi_field(N, n, k)
            ratio = apply_diffop("L1", k, f, x, y) / f(x, y)
            for form in err:
                mu = mu_eigenvalue(n, k, form)
                err[form] = max(err[form], float(np.max(np.abs(ratio - mu)) / max(abs(mu), 1.0)))
    return {"k": k.k, "residual": err, "selected": min(err, key=err.get)}


def resolve_bracket(seed: int = DEFAULT_SEED) -> dict:
    """Which constant in ``n(n + e1 + shift)`` zeroes the non-integer residual."""
    rng = panel_rng(seed, 10)
    err = {"n(n+e1-1)": 0.0, "n(n+e1)": 0.0}
    for w, n, t in wilsonfn_panel(rng, 5):
        err["n(n+e1-1)"] = max(err["n(n+e1-1)"], abs(phi_residual(n, w, t, shift=-1)))
        err["n(n+e1)"] = max(err["n(n+e1)"], abs(phi_residual(n, w, t, shift=0)))
    return {"residual": err, "selected": min(err, key=err.get)}


def criterion_10(seed: int = DEFAULT_SEED, prior: list[CheckResult] | None = None, grid_order: int | None = None) -> CheckResult:
    """Both ambiguities resolved by oracle, and criteria 1-9 pass under the resolved forms."""
    with timed() as clock:
        mu = resolve_mu_sign(seed)
        br = resolve_bracket(seed)
        if prior is None:
            prior = [f(seed) for f in CRITERIA[:9]] if grid_order is None else _run_first_nine(seed, grid_order)
        decisive = lambda e, sel: max(e.values()) > 1e3 * e[sel]  # noqa: E731
        parts = [
            CheckResult.from_residual("mu_n form", "-(2n+1)^2-2(2n+1)(k_1+k_2)", 1e-5, mu["residual"][mu["selected"]]),
            CheckResult.from_residual("bracket constant", "making use of the Stirling formula", 1e-6, br["residual"][br["selected"]]),
        ]
        parts[0].passed &= decisive(mu["residual"], mu["selected"])
        parts[1].passed &= decisive(br["residual"], br["selected"])
        suite_ok = all(p.passed for p in prior)
    res = combine("10 eigenvalue disambiguation", "resolved by numeric oracle", parts)
    res.passed = res.passed and suite_ok
    res.details.update(
        mu_n=mu, bracket=br, criteria_1_to_9_pass=suite_ok, failing=[p.name for p in prior if not p.passed]
    )
    res.wall_time = clock["seconds"] + sum(p.wall_time for p in prior)
    return res


def _run_first_nine(seed, grid_order):
    return [criterion_3(seed, grid_order) if i == 2 else f(seed) for i, f in enumerate(CRITERIA[:9])]


CRITERIA = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
)


def run_criterion(i: int, seed: int = DEFAULT_SEED, grid_order: int | None = None) -> CheckResult:
    if i == 3:
        return criterion_3(seed, grid_order)
    if i == 10:
        return criterion_10(seed, grid_order=grid_order)
    return CRITERIA[i - 1](seed)


def run_all(seed: int = DEFAULT_SEED, grid_order: int | None = None) -> list[CheckResult]:
    first = _run_first_nine(seed, grid_order)
    return first + [criterion_10(seed, prior=first)]
