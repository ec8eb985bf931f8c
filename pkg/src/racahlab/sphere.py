"""Eigenbases of the generic potential on the first octant of the 2-sphere.

Coordinates: ``s1 = sin(theta) cos(phi)``, ``s2 = sin(theta) sin(phi)``,
``s3 = cos(theta)`` with ``x = cos(2 phi)`` and ``y = cos(2 theta)``, so that

    s1^2 = (1+x)(1-y)/4,   s2^2 = (1-x)(1-y)/4,   s3^2 = (1+y)/2.

The open octant is the open square ``(x, y) in (-1, 1)^2``.  Area measure is
``dA = dx dy / (4 sqrt(2) sqrt(1-x^2) sqrt(1+y))``.

Operator labels follow the eigenbases: ``L1`` is the symmetry diagonal on the
Psi basis (rotation in the s1-s2 plane, potential terms in a1, a2), ``L2`` is
diagonal on the Lambda basis (s2-s3 plane, a2, a3) and ``L3`` is the
remaining one (s3-s1 plane, a3, a1).  ``H = L1 + L2 + L3 + a1 + a2 + a3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError
from .specialfn import gamma_ratio, jacobi_p, jacobi_p_dy, log_gamma_ratio

K_MAX = 3.0


@dataclass(frozen=True)
class Params3:
    """Potential parameters ``(k1, k2, k3)``; ``a_j = 1/4 - k_j^2``."""

    k1: float
    k2: float
    k3: float

    def __post_init__(self):
        for name in ("k1", "k2", "k3"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (0.0 < v <= K_MAX):
                raise ParameterError(f"{name}={v} outside (0, {K_MAX}]")

    @property
    def k(self) -> tuple[float, float, float]:
        return (self.k1, self.k2, self.k3)

    @property
    def a(self) -> tuple[float, float, float]:
        return tuple(0.25 - kj * kj for kj in self.k)

    @property
    def ksum(self) -> float:
        return self.k1 + self.k2 + self.k3

    def swap13(self) -> "Params3":
        return Params3(self.k3, self.k2, self.k1)

    def shifted(self, d1: float = 0.0, d2: float = 0.0, d3: float = 0.0) -> "Params3":
        return Params3(self.k1 + d1, self.k2 + d2, self.k3 + d3)


def energy(N: float, k: Params3) -> float:
    return -((2 * N + k.ksum + 2) ** 2) + 0.25


@dataclass(frozen=True)
class BasisIndex:
    N: float
    n: int
    k: Params3

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError("basis index must be nonnegative")
        if float(self.N).is_integer() and self.n > self.N:
            raise ParameterError(f"index n={self.n} exceeds N={self.N}")

    @property
    def energy(self) -> float:
        return energy(self.N, self.k)


# -- coordinates -------------------------------------------------------------


def xy_to_XY(x, y):
    """Coordinates after the permutation s1 <-> s3.

    The permutation is an involution, so this map is its own inverse.
    """
    X = (1 + x + 3 * y - x * y) / (x * y - x + y + 3)
    Y = (x - y - 1 - x * y) / 2
    return X, Y


def _XY_jacobian(x, y):
    den = x * y - x + y + 3
    num = 1 + x + 3 * y - x * y
    X_x = ((1 - y) * den - num * (y - 1)) / den**2
    X_y = ((3 - x) * den - num * (x + 1)) / den**2
    Y_x = (1 - y) / 2
    Y_y = -(1 + x) / 2
    return X_x, X_y, Y_x, Y_y


@dataclass(frozen=True)
class SpherePoint:
    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        r2 = self.s1**2 + self.s2**2 + self.s3**2
        if abs(r2 - 1.0) > 1e-14:
            raise DomainError(f"point not on the unit sphere (|s|^2 = {r2})")
        if min(self.s1, self.s2, self.s3) <= 0:
            raise DomainError("point outside the open first octant")

    @classmethod
    def from_xy(cls, x: float, y: float) -> "SpherePoint":
        if not (-1 < x < 1 and -1 < y < 1):
            raise DomainError(f"(x, y) = ({x}, {y}) outside the open square")
        return cls.from_angles(math.acos(y) / 2, math.acos(x) / 2)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "SpherePoint":
        st = math.sin(theta)
        return cls(st * math.cos(phi), st * math.sin(phi), math.cos(theta))

    @property
    def theta(self) -> float:
        return math.atan2(math.hypot(self.s1, self.s2), self.s3)

    @property
    def phi(self) -> float:
        return math.atan2(self.s2, self.s1)

    @property
    def x(self) -> float:
        return (self.s1**2 - self.s2**2) / (self.s1**2 + self.s2**2)

    @property
    def y(self) -> float:
        return 1 - 2 * (self.s1**2 + self.s2**2)

    @property
    def X(self) -> float:
        return xy_to_XY(self.x, self.y)[0]

    @property
    def Y(self) -> float:
        return xy_to_XY(self.x, self.y)[1]

    def swap13(self) -> "SpherePoint":
        return SpherePoint(self.s3, self.s2, self.s1)


# -- scalar fields -------------------------------------------------------------

# Basis-function values carry ~1e-11 relative rounding noise at N ~ 8, so the
# step cannot be small; one Richardson pass on the 4th-order stencils
# (h and h/2) removes the leading truncation term instead.
FD_STEP = 8e-3


def boundary_distance(x, y):
    return np.minimum(1 - np.abs(x), 1 - np.abs(y))


_C1 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))
_C2 = ((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0))


def _d1(g, h):
    return sum(c * g(o * h) for o, c in _C1) / (12 * h)


def _d2(g, h):
    return sum(c * g(o * h) for o, c in _C2) / (12 * h * h)


def _richardson(d, g, h):
    return (16 * d(g, h / 2) - d(g, h)) / 15


class Field:
    """Scalar function of ``(x, y)`` with optional exact first partials.

    Missing partials fall back to central differences.  Instances hold no
    mutable state and may be evaluated from several threads.
    """

    def __init__(self, fn: Callable, dx: Callable | None = None, dy: Callable | None = None, h: float = FD_STEP):
        self._fn = fn
        self._dx = dx
        self._dy = dy
        self.h = h

    def __call__(self, x, y):
        return self._fn(x, y)

    def dx(self, x, y):
        if self._dx is not None:
            return self._dx(x, y)
        return _richardson(_d1, lambda u: self._fn(x + u, y), self.h)

    def dy(self, x, y):
        if self._dy is not None:
            return self._dy(x, y)
        return _richardson(_d1, lambda u: self._fn(x, y + u), self.h)

    @property
    def has_exact_partials(self) -> bool:
        return self._dx is not None and self._dy is not None

    def __add__(self, other: "Field") -> "Field":
        return Field(lambda x, y: self(x, y) + other(x, y), h=self.h)

    def scaled(self, c: float) -> "Field":
        dx = (lambda x, y: c * self._dx(x, y)) if self._dx else None
        dy = (lambda x, y: c * self._dy(x, y)) if self._dy else None
        return Field(lambda x, y: c * self(x, y), dx, dy, h=self.h)


def second_partials(f: Field, x, y, h: float | None = None):
    """``(f_xx, f_xy, f_yy, f_x, f_y)`` from finite differences.

    4th-order central stencils at steps ``h`` and ``h/2`` combined by one
    Richardson step.
    """
    h = f.h if h is None else h
    fxx = _richardson(_d2, lambda u: f(x + u, y), h)
    fyy = _richardson(_d2, lambda u: f(x, y + u), h)
    fx = _richardson(_d1, lambda u: f(x + u, y), h)
    fy = _richardson(_d1, lambda u: f(x, y + u), h)

    def mixed(hh):
        return _d1(lambda u: _d1(lambda v: f(x + u, y + v), hh), hh)

    fxy = (16 * mixed(h / 2) - mixed(h)) / 15
    return fxx, fxy, fyy, fx, fy


# -- basis functions -----------------------------------------------------------


def _edge_factor(u, e_minus, e_plus):
    """((1-u)/2)^e_minus ((1+u)/2)^e_plus and its log-derivative."""
    val = ((1 - u) / 2) ** e_minus * ((1 + u) / 2) ** e_plus
    dlog = -e_minus / (1 - u) + e_plus / (1 + u)
    return val, dlog


def _psi_factors(N: int, n: int, k: Params3, x, y, derivs: bool = False):
    k1, k2, k3 = k.k
    a_y = 2 * n + k1 + k2 + 1
    ex, lx = _edge_factor(x, (k2 + 0.5) / 2, (k1 + 0.5) / 2)
    ey, ly = _edge_factor(y, a_y / 2, (k3 + 0.5) / 2)
    px = jacobi_p(n, k2, k1, x)
    py = jacobi_p(N - n, a_y, k3, y)
    fx, fy = ex * px, ey * py
    if not derivs:
        return fx, fy
    dfx = ex * (lx * px + jacobi_p_dy(n, k2, k1, x))
    dfy = ey * (ly * py + jacobi_p_dy(N - n, a_y, k3, y))
    return fx, fy, dfx, dfy


def _check_index(N: int, n: int) -> None:
    if not (0 <= n <= N):
        raise ParameterError(f"need 0 <= n <= N, got n={n}, N={N}")


def psi(N: int, n: int, k: Params3, x, y):
    """Psi_{N-n,n}: joint eigenfunction of H (energy E_N) and L1 (index n)."""
    _check_index(N, n)
    fx, fy = _psi_factors(N, n, k, x, y)
    return fx * fy


def psi_field(N: int, n: int, k: Params3, scale: float = 1.0) -> Field:
    _check_index(N, n)

    def fn(x, y):
        fx, fy = _psi_factors(N, n, k, x, y)
        return scale * fx * fy

    def dx(x, y):
        fx, fy, dfx, dfy = _psi_factors(N, n, k, x, y, derivs=True)
        return scale * dfx * fy

    def dy(x, y):
        fx, fy, dfx, dfy = _psi_factors(N, n, k, x, y, derivs=True)
        return scale * fx * dfy

    return Field(fn, dx, dy)


def lambda_basis(N: int, q: int, k: Params3, x, y):
    """Lambda_{N-q,q}: Psi under the permutation 1 <-> 3 (eigenfunction of L2)."""
    X, Y = xy_to_XY(x, y)
    return psi(N, q, k.swap13(), X, Y)


def lambda_field(N: int, q: int, k: Params3, scale: float = 1.0) -> Field:
    inner = psi_field(N, q, k.swap13(), scale)

    def fn(x, y):
        return inner(*xy_to_XY(x, y))

    def dx(x, y):
        X, Y = xy_to_XY(x, y)
        X_x, _, Y_x, _ = _XY_jacobian(x, y)
        return inner.dx(X, Y) * X_x + inner.dy(X, Y) * Y_x

    def dy(x, y):
        X, Y = xy_to_XY(x, y)
        _, X_y, _, Y_y = _XY_jacobian(x, y)
        return inner.dx(X, Y) * X_y + inner.dy(X, Y) * Y_y

    return Field(fn, dx, dy)


def rescale_factor(N: int, n: int, k: Params3) -> float:
    """Factor taking Psi to Psi': (-1)^n n! (N-n)! / (Gamma(N-n+k3+1) Gamma(n+k2+1))."""
    _check_index(N, n)
    r = gamma_ratio([n + 1, N - n + 1], [N - n + k.k3 + 1, n + k.k2 + 1])
    return -r if n % 2 else r


def psi_prime(N: int, n: int, k: Params3, x, y):
    return rescale_factor(N, n, k) * psi(N, n, k, x, y)


def lambda_prime(N: int, q: int, k: Params3, x, y):
    X, Y = xy_to_XY(x, y)
    return psi_prime(N, q, k.swap13(), X, Y)


def psi_prime_field(N: int, n: int, k: Params3) -> Field:
    return psi_field(N, n, k, rescale_factor(N, n, k))


def lambda_prime_field(N: int, q: int, k: Params3) -> Field:
    return lambda_field(N, q, k, rescale_factor(N, q, k.swap13()))


def log_norm_psi_sq(N: int, n: int, k: Params3) -> float:
    _check_index(N, n)
    k1, k2, k3 = k.k
    logv, sign = log_gamma_ratio(
        [n + k1 + 1, n + k2 + 1, N - n + k3 + 1, N + n + k1 + k2 + 2],
        [n + 1, N - n + 1, n + k1 + k2 + 1, N + n + k1 + k2 + k3 + 2],
    )
    if sign <= 0:
        raise ParameterError("squared norm not positive; parameters outside the supported domain")
    return logv - math.log(4 * (2 * N + k.ksum + 2) * (2 * n + k1 + k2 + 1))


def norm_psi_sq(N: int, n: int, k: Params3) -> float:
    """Closed-form squared norm of Psi_{N-n,n} for the area measure on the octant."""
    return math.exp(log_norm_psi_sq(N, n, k))


def norm_lambda_sq(N: int, q: int, k: Params3) -> float:
    return norm_psi_sq(N, q, k.swap13())


def norm_psi_prime_sq(N: int, n: int, k: Params3) -> float:
    return rescale_factor(N, n, k) ** 2 * norm_psi_sq(N, n, k)


def norm_lambda_prime_sq(N: int, q: int, k: Params3) -> float:
    return norm_psi_prime_sq(N, q, k.swap13())


def l1_eigenvalue(n: int, k: Params3) -> float:
    """Eigenvalue of L1 on Psi_{N-n,n}."""
    k1, k2, _ = k.k
    return -4 * n * (n + k1 + k2 + 1) - (2 * k1 * k2 + 2 * k1 + 2 * k2 + 1.5)


def l2_eigenvalue(q: int, k: Params3) -> float:
    """Eigenvalue of L2 on Lambda_{N-q,q}."""
    _, k2, k3 = k.k
    return -4 * q * (q + k2 + k3 + 1) - (2 * k2 * k3 + 2 * k2 + 2 * k3 + 1.5)


# -- second-order operators ----------------------------------------------------


def _j_squared(i: int, x, y):
    """Coefficients (xx, xy, yy, x, y) of J_i^2 in (x, y) coordinates."""
    if i == 3:
        z = np.zeros_like(np.asarray(x, dtype=float))
        return 4 * (1 - x * x), z, z, -4 * x, z
    if i == 1:
        return (
            2 * (x - 1) * (x + 1) ** 2 * (y + 1) / (y - 1),
            -4 * (x - 1) * (x + 1) * (y + 1),
            2 * (x - 1) * (y - 1) * (y + 1),
            (x + 1) * (3 * x * y + 5 * x - y - 3) / (y - 1),
            x * y - x - 3 * y - 1,
        )
    if i == 2:
        return (
            -2 * (x - 1) ** 2 * (x + 1) * (y + 1) / (y - 1),
            4 * (x - 1) * (x + 1) * (y + 1),
            -2 * (x + 1) * (y - 1) * (y + 1),
            -(x - 1) * (3 * x * y + 5 * x + y + 3) / (y - 1),
            -x * y + x - 3 * y - 1,
        )
    raise ValueError(i)


def _ratios(x, y):
    s1 = (1 + x) * (1 - y) / 4
    s2 = (1 - x) * (1 - y) / 4
    s3 = (1 + y) / 2
    return s1, s2, s3


def _potential(op: str, k: Params3, x, y):
    a1, a2, a3 = k.a
    q1, q2, q3 = _ratios(x, y)
    if op == "L1":
        return a1 * q2 / q1 + a2 * q1 / q2
    if op == "L2":
        return a2 * q3 / q2 + a3 * q2 / q3
    if op == "L3":
        return a3 * q1 / q3 + a1 * q3 / q1
    if op == "H":
        return a1 / q1 + a2 / q2 + a3 / q3
    raise ValueError(f"unknown operator {op!r}")


_ROTATION = {"L1": (3,), "L2": (1,), "L3": (2,), "H": (1, 2, 3)}

OPERATORS = tuple(_ROTATION)


def diffop_coefficients(op: str, x, y):
    """Second-order coefficients of the kinetic part of ``op``."""
    parts = [_j_squared(i, x, y) for i in _ROTATION[op]]
    return tuple(sum(p[j] for p in parts) for j in range(5))


def apply_diffop(op: str, k: Params3, f: Field, x, y, h: float | None = None):
    """Apply H, L1, L2 or L3 to ``f`` at ``(x, y)`` by finite differences.

    Points closer than ``10 h`` to the edge of the square are rejected.
    """
    if op not in _ROTATION:
        raise ValueError(f"unknown operator {op!r}")
    h = f.h if h is None else h
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(boundary_distance(x, y) < 10 * h):
        raise DomainError("point within 10 h of the coordinate boundary")
    cxx, cxy, cyy, cx, cy = diffop_coefficients(op, x, y)
    fxx, fxy, fyy, fx, fy = second_partials(f, x, y, h)
    return cxx * fxx + cxy * fxy + cyy * fyy + cx * fx + cy * fy + _potential(op, k, x, y) * f(x, y)


def diffop_field(op: str, k: Params3, f: Field, h: float | None = None) -> Field:
    hh = f.h if h is None else h
    return Field(lambda x, y: apply_diffop(op, k, f, x, y, hh), h=hh)


# -- first-order intertwining operators ----------------------------------------


def apply_T(k: Params3, f: Field) -> Field:
    """T: W(k1,k2,k3) -> W(k1-1,k2-1,k3); first order in x."""
    k.shifted(-1, -1, 0)
    _, k2, _ = k.k
    k1 = k.k1

    def fn(x, y):
        return (
            np.sqrt(1 - x * x) * f.dx(x, y)
            - 0.5 * (k2 - 0.5) * np.sqrt((1 + x) / (1 - x)) * f(x, y)
            + 0.5 * (k1 - 0.5) * np.sqrt((1 - x) / (1 + x)) * f(x, y)
        )

    return Field(fn, h=f.h)


def apply_Tstar(k: Params3, f: Field) -> Field:
    """Adjoint of T: W(k1,k2,k3) -> W(k1+1,k2+1,k3)."""
    k.shifted(1, 1, 0)
    k1, k2, _ = k.k

    def fn(x, y):
        return (
            -np.sqrt(1 - x * x) * f.dx(x, y)
            - 0.5 * (k2 + 0.5) * np.sqrt((1 + x) / (1 - x)) * f(x, y)
            + 0.5 * (k1 + 0.5) * np.sqrt((1 - x) / (1 + x)) * f(x, y)
        )

    return Field(fn, h=f.h)


def apply_U_ppmm(k: Params3, N: float, f: Field) -> Field:
    """U_(+,+,-,-): first order in y, depends on the level N."""
    k.shifted(0, 0, 1)
    k1, k2, k3 = k.k

    def fn(x, y):
        return np.sqrt((1 + y) / 2) * (
            -(1 - y) * f.dy(x, y)
            + (-N - k1 / 2 - k2 / 2 - 0.5 + 0.5 * (k3 + 0.5) * (1 - y) / (1 + y)) * f(x, y)
        )

    return Field(fn, h=f.h)


def apply_U_pmmp(k: Params3, N: float, f: Field, displayed: bool = False) -> Field:
    """U_(+,-,-,+): first order in y, depends on the level N.

    Maps Psi_{m,n} to ``(n+N+k1+k2+k3+2) Psi^(k1,k2,k3+1)_{m,n}``.  The
    edge term is ``+(k3+1/2)(1-y)/(2(1+y))``; ``displayed=True`` flips its
    sign, which breaks the basis action.
    """
    k.shifted(0, 0, 1)
    k1, k2, k3 = k.k
    edge = -1.0 if displayed else 1.0

    def fn(x, y):
        return np.sqrt((1 + y) / 2) * (
            (y - 1) * f.dy(x, y)
            + (N + k1 / 2 + k2 / 2 + k3 + 1.5 + edge * 0.5 * (k3 + 0.5) * (1 - y) / (1 + y)) * f(x, y)
        )

    return Field(fn, h=f.h)


def apply_V(k: Params3, f: Field, displayed: bool = False) -> Field:
    """V = U_(+,-,-,+) + U_(+,+,-,-): the N-dependence cancels.

    ``V = sqrt((1+y)/2) [2(y-1) d/dy + k3 + 1 + (k3+1/2)(1-y)/(1+y)]``.
    With ``displayed=True`` the last term is dropped (the sum of the two U
    forms when the U_(+,-,-,+) edge term has the opposite sign).

    V maps level N to levels N-1 and N of W(k1,k2,k3+1), whose energies
    differ from E_N, so it does not satisfy ``V H = H' V``.
    """
    k.shifted(0, 0, 1)
    k3 = k.k3
    edge = 0.0 if displayed else 1.0

    def fn(x, y):
        return np.sqrt((1 + y) / 2) * (
            2 * (y - 1) * f.dy(x, y) + (k3 + 1 + edge * (k3 + 0.5) * (1 - y) / (1 + y)) * f(x, y)
        )

    return Field(fn, h=f.h)
