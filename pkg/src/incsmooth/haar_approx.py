"""Piecewise constant midpoint interpolation on the Haar space and its error.

``T_n`` samples ``f`` at the midpoints of the dyadic intervals
``I_m = [m/2^n, (m+1)/2^n)`` (the last one closed) and returns the step
function with those values.  On Haar functions it acts by a simple case
analysis (:func:`tn_haar`): functions below level n are reproduced, at each
level ``l >= n`` exactly one function per interval is non-zero at the
midpoint, and everything else is annihilated.

Smoothness is measured by ``||f||^2 = sum |a_nu|^2 max(nu, 1)^r`` (or the
block weights ``2^(l r)`` on level l).  The interpolation error then obeys
``||f - T_n f|| <= (1 + c) 2^(-n r / 2) ||f||`` with
``c = (1 - 2^(1 - r))^(-1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from incsmooth.bases import BasisFamily, basis_matrix
from incsmooth.errors import BoundViolation, SmoothnessTooLow

HAAR_BASIS = BasisFamily.haar()
WEIGHTINGS = ("nu", "block")


def _check_r(r1: float) -> None:
    if not r1 > 1:
        raise SmoothnessTooLow(f"r1 must exceed 1 (got {r1})")


def bound_constant(r1: float) -> float:
    """``1 + c`` with ``c = (1 - 2^(1 - r1))^(-1/2)``."""
    _check_r(r1)
    return 1.0 + (1.0 - 2.0 ** (1.0 - r1)) ** -0.5


def midpoints(n: int) -> np.ndarray:
    return (2 * np.arange(1 << n) + 1) / 2.0 ** (n + 1)


def haar_level(nu) -> np.ndarray:
    """Level l with ``nu in I_l = [2^l, 2^(l+1))``; -1 for ``nu = 0``."""
    nu = np.asarray(nu, dtype=np.int64)
    out = np.full(nu.shape, -1, dtype=np.int64)
    pos = nu > 0
    out[pos] = np.array([int(v).bit_length() - 1 for v in nu[pos].ravel()]).reshape(nu[pos].shape)
    return out


def smoothness_weights(n_coef: int, r1: float, weighting: str = "nu") -> np.ndarray:
    """``max(nu, 1)^r1``, or ``2^(l r1)`` on level l, for ``nu < n_coef``."""
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    nu = np.arange(n_coef)
    if weighting == "nu":
        return np.maximum(nu, 1).astype(float) ** r1
    return np.exp2(np.maximum(haar_level(nu), 0) * r1)


@dataclass(frozen=True)
class HaarInterpolant:
    """Step function on the level-n dyadic intervals."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (1 << self.n,):
            raise ValueError(f"need {1 << self.n} values for level {self.n}")
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        m = np.minimum(np.floor(x * (1 << self.n)).astype(np.int64), (1 << self.n) - 1)
        return self.values[m]

    def haar_coefficients(self) -> np.ndarray:
        """Coefficients on ``e_0, ..., e_{2^n - 1}``, which span the level-n step functions."""
        N = 1 << self.n
        E = basis_matrix(HAAR_BASIS, N - 1, midpoints(self.n))
        return E.T @ self.values / N


def interpolate(n: int, f: Callable[[np.ndarray], np.ndarray]) -> HaarInterpolant:
    """``T_n f`` from the values of ``f`` at the midpoints."""
    return HaarInterpolant(n, np.asarray(f(midpoints(n))))


def haar_index(ell: int, m: int, n: int) -> tuple[int, float]:
    """The Haar function of level ``ell`` that is non-zero at the midpoint of ``I_m``, and its value there."""
    if ell < n or not 0 <= m < (1 << n):
        raise ValueError("need ell >= n and 0 <= m < 2^n")
    if ell == n:
        return (1 << ell) + m, -(2.0 ** (ell / 2))
    return (1 << ell) + m * (1 << (ell - n)) + (1 << (ell - n - 1)), 2.0 ** (ell / 2)


def tn_haar(nu: int, n: int) -> tuple[str, int | None, float]:
    """Case analysis of ``T_n e_nu``: ("same", None, 1), ("step", m, c) or ("zero", None, 0)."""
    if nu < (1 << n):
        return "same", None, 1.0
    ell = int(nu).bit_length() - 1
    offset = nu - (1 << ell)
    if ell == n:
        return "step", offset, -(2.0 ** (ell / 2))
    span = 1 << (ell - n)
    m, rest = divmod(offset, span)
    if rest == span // 2:
        return "step", m, 2.0 ** (ell / 2)
    return "zero", None, 0.0


def _step_sums(n: int, coeffs: np.ndarray) -> np.ndarray:
    """``sum_{l >= n} a_{k(l, m)} c(l)`` for each m; ``coeffs`` may carry leading batch axes."""
    N = coeffs.shape[-1]
    out = np.zeros(coeffs.shape[:-1] + (1 << n,), dtype=coeffs.dtype)
    m = np.arange(1 << n)
    ell = n
    while (1 << ell) < N:
        if ell == n:
            k = (1 << ell) + m
            c = -(2.0 ** (ell / 2))
        else:
            k = (1 << ell) + m * (1 << (ell - n)) + (1 << (ell - n - 1))
            c = 2.0 ** (ell / 2)
        ok = k < N
        out[..., ok] += c * coeffs[..., k[ok]]
        ell += 1
    return out


def tn_image(n: int, coeffs) -> HaarInterpolant:
    """``T_n f`` for ``f = sum a_nu e_nu``, evaluated through the case analysis."""
    a = np.asarray(coeffs)
    N = 1 << n
    head = a[: min(N, len(a))]
    low = basis_matrix(HAAR_BASIS, len(head) - 1, midpoints(n)) @ head if len(head) else np.zeros(N)
    return HaarInterpolant(n, low + _step_sums(n, a))


@dataclass(frozen=True)
class MeasuredError:
    l2_error: float
    h1_norm: float
    bound: float


def interpolation_errors(n: int, coeffs, r1: float, weighting: str = "nu") -> tuple[np.ndarray, np.ndarray]:
    """Exact ``||f - T_n f||_0`` and ``||f||`` for each row of ``coeffs``.

    Haar functions of level ``>= n`` are orthogonal to level-n step
    functions, so the squared error is ``sum_{nu >= 2^n} |a_nu|^2`` plus
    ``2^-n sum_m |sum_l a_{k(l,m)} c(l)|^2``.
    """
    _check_r(r1)
    a = np.atleast_2d(np.asarray(coeffs))
    w = smoothness_weights(a.shape[-1], r1, weighting)
    h1 = np.sqrt(np.sum(np.abs(a) ** 2 * w, axis=-1))
    high = np.sum(np.abs(a[:, 1 << n :]) ** 2, axis=-1)
    steps = np.sum(np.abs(_step_sums(n, a)) ** 2, axis=-1) / (1 << n)
    return np.sqrt(high + steps), h1


def measured_error(n: int, coeffs, r1: float, weighting: str = "nu", check: bool = True) -> MeasuredError:
    """Interpolation error of one function with its smoothness norm and the proven bound."""
    err, h1 = interpolation_errors(n, coeffs, r1, weighting)
    bound = bound_constant(r1) * 2.0 ** (-n * r1 / 2) * h1[0]
    if check and err[0] > bound * (1 + 1e-12):
        raise BoundViolation(f"interpolation error {err[0]:.6g} exceeds the bound {bound:.6g}")
    return MeasuredError(float(err[0]), float(h1[0]), float(bound))


def sample_unit_ball(n_samples: int, n_coef: int, r1: float, rng: np.random.Generator, weighting: str = "nu") -> np.ndarray:
    """Coefficient vectors uniformly distributed in the unit ball of the smoothness norm."""
    g = rng.standard_normal((n_samples, n_coef))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = rng.uniform(size=(n_samples, 1)) ** (1.0 / n_coef)
    return g * radius / np.sqrt(smoothness_weights(n_coef, r1, weighting))


# ---------------------------------------------------------------------------
# worst case over the unit ball
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WorstCase:
    lower: float
    upper: float
    bound: float
    tail: float


def _worst_sq(n: int, r1: float, trunc_L: int, weighting: str) -> float:
    """Top eigenvalue of the error Gram matrix over ``nu < 2^trunc_L``, block by block.

    In scaled coordinates ``b_nu = sqrt(w_nu) a_nu`` the squared error is
    ``sum_{nu >= 2^n} b_nu^2 / w_nu + 2^-n sum_m (sum_l u_{l,m} b_{k(l,m)})^2``
    with ``u = c(l) / sqrt(w_k)``.  The form splits into one small block per
    interval m plus a diagonal over the remaining indices.
    """
    N = 1 << trunc_L
    w = smoothness_weights(N, r1, weighting)
    best = 0.0
    used = np.zeros(N, dtype=bool)
    levels = range(n, trunc_L)
    for m in range(1 << n):
        ks, cs = zip(*(haar_index(ell, m, n) for ell in levels))
        ks = np.array(ks)
        used[ks] = True
        u = np.array(cs) / np.sqrt(w[ks])
        B = np.diag(1.0 / w[ks]) + np.outer(u, u) / (1 << n)
        best = max(best, float(np.linalg.eigvalsh(B)[-1]))
    rest = np.arange(1 << n, N)
    rest = rest[~used[rest]]
    if len(rest):
        best = max(best, float(np.max(1.0 / w[rest])))
    return best


def worst_case_tail(n: int, r1: float, trunc_L: int) -> float:
    """Upper bound on ``||(I - T_n) f||_0`` for unit-norm ``f`` supported on ``nu >= 2^trunc_L``."""
    c = bound_constant(r1) - 1.0
    return (1.0 + c * 2.0 ** ((trunc_L - n) / 2)) * 2.0 ** (-trunc_L * r1 / 2)


def worst_case_error(n: int, r1: float, trunc_L: int | None = None, weighting: str = "nu") -> WorstCase:
    """``sup ||f - T_n f||_0`` over the unit ball: exact on ``nu < 2^trunc_L``, bracketed beyond."""
    _check_r(r1)
    L = n + 10 if trunc_L is None else trunc_L
    if L <= n:
        raise ValueError("trunc_L must exceed n")
    lower = math.sqrt(_worst_sq(n, r1, L, weighting))
    bound = bound_constant(r1) * 2.0 ** (-n * r1 / 2)
    tail = worst_case_tail(n, r1, L)
    upper = min(bound, lower + tail)
    if lower > upper * (1 + 1e-12):
        raise BoundViolation(f"worst-case lower value {lower:.6g} exceeds the upper value {upper:.6g}")
    return WorstCase(lower, upper, bound, tail)


def error_gram_dense(n: int, r1: float, trunc_L: int, weighting: str = "nu") -> np.ndarray:
    """Gram matrix of ``(I - T_n) e~_nu``, ``nu < 2^trunc_L``, by sampling every function on the finest grid.

    Independent of the case analysis: the images are evaluated pointwise on
    the level-``trunc_L`` cells, where all functions involved are constant.
    """
    N = 1 << trunc_L
    x = (np.arange(N) + 0.5) / N
    E = basis_matrix(HAAR_BASIS, N - 1, x)
    mids = basis_matrix(HAAR_BASIS, N - 1, midpoints(n))
    cell = np.minimum(np.floor(x * (1 << n)).astype(np.int64), (1 << n) - 1)
    images = E - mids[cell]
    images /= np.sqrt(smoothness_weights(N, r1, weighting))
    return images.T @ images / N
