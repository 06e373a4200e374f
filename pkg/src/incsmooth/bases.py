"""Orthonormal bases of L2(D, mu0) used to realise the weighted spaces as function spaces.

Four families:

* ``Trigonometric`` on [0, 1]: ``e_nu(x) = exp(2 pi i (-1)^nu ceil(nu/2) x)``
* ``Walsh`` on [0, 1], Paley order: products of Rademacher functions picked
  by the binary digits of nu
* ``Haar`` on [0, 1]: ``e_{2^l + m}(x) = 2^(l/2) psi(2^l x - m)``
* ``Jacobi(alpha, beta)`` on [-1, 1] w.r.t. the normalised weight
  ``(1-x)^alpha (1+x)^beta``; ``Legendre`` is ``Jacobi(0, 0)``

Step functions are right-continuous with the last dyadic interval closed, so
``x = 1`` belongs to the final cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln, roots_jacobi

from incsmooth.errors import DomainError, IndexOutOfTable
from incsmooth.sequences import _logsumexp
from incsmooth.weights import POLYNOMIAL, SUBEXPONENTIAL, WeightFamily, decay_params

TRIGONOMETRIC = "Trigonometric"
WALSH = "Walsh"
HAAR = "Haar"
JACOBI = "Jacobi"
BASIS_KINDS = (TRIGONOMETRIC, WALSH, HAAR, JACOBI)


@dataclass(frozen=True)
class BasisFamily:
    kind: str
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"basis kind must be one of {BASIS_KINDS}, got {self.kind!r}")
        if self.kind == JACOBI and not (self.alpha > -0.5 and self.beta > -0.5):
            raise ValueError("Jacobi parameters must exceed -1/2")

    @classmethod
    def trigonometric(cls) -> "BasisFamily":
        return cls(TRIGONOMETRIC)

    @classmethod
    def walsh(cls) -> "BasisFamily":
        return cls(WALSH)

    @classmethod
    def haar(cls) -> "BasisFamily":
        return cls(HAAR)

    @classmethod
    def jacobi(cls, alpha: float, beta: float) -> "BasisFamily":
        return cls(JACOBI, float(alpha), float(beta))

    @classmethod
    def legendre(cls) -> "BasisFamily":
        return cls(JACOBI, 0.0, 0.0)

    @classmethod
    def from_dict(cls, spec: Mapping | str) -> "BasisFamily":
        if isinstance(spec, str):
            spec = {"kind": spec}
        kind = spec["kind"]
        if kind.lower() == "legendre":
            return cls.legendre()
        for k in BASIS_KINDS:
            if kind.lower() == k.lower():
                return cls(k, float(spec.get("alpha", 0.0)), float(spec.get("beta", 0.0)))
        raise ValueError(f"unknown basis kind {kind!r}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == JACOBI:
            d.update(alpha=self.alpha, beta=self.beta)
        return d

    @property
    def domain(self) -> tuple[float, float]:
        return (-1.0, 1.0) if self.kind == JACOBI else (0.0, 1.0)

    @property
    def sigma(self) -> float:
        """Exponent with ``sup |e_nu| ~ nu^sigma`` (for Haar, per dyadic block)."""
        return max(self.alpha, self.beta) + 0.5 if self.kind == JACOBI else 0.0

    @property
    def is_complex(self) -> bool:
        return self.kind == TRIGONOMETRIC

    @property
    def default_anchor(self) -> float:
        """Point used as the anchor of the anchored norms: 0, or the Jacobi centre of mass."""
        if self.kind == JACOBI:
            return (self.beta - self.alpha) / (self.alpha + self.beta + 2.0)
        return 0.0

    def describe(self) -> str:
        if self.kind == JACOBI:
            return f"Jacobi(alpha={self.alpha:g}, beta={self.beta:g})"
        return self.kind


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _check_domain(basis: BasisFamily, x: np.ndarray) -> None:
    lo, hi = basis.domain
    bad = ~((x >= lo) & (x <= hi))
    if np.any(bad):
        raise DomainError(f"points outside {basis.domain}: {x[bad][:5].tolist()}")


def _dyadic_cell(x: np.ndarray, level: int) -> np.ndarray:
    """Index of the level-``level`` dyadic cell containing x, with x = 1 in the last one."""
    n = 1 << level
    return np.minimum(np.floor(x * n).astype(np.int64), n - 1)


def _trig(nu: np.ndarray, x: np.ndarray) -> np.ndarray:
    freq = np.where(nu % 2 == 0, 1, -1) * ((nu + 1) // 2)
    return np.exp(2j * np.pi * freq * x)


def _walsh(nu: np.ndarray, x: np.ndarray) -> np.ndarray:
    top = int(np.max(nu)).bit_length() if nu.size else 0
    cell = _dyadic_cell(x, max(top, 1))
    # Paley: bit k of nu selects the Rademacher function r_k, whose sign is x's binary digit k+1
    digits_reversed = np.zeros_like(cell)
    for k in range(top):
        digits_reversed |= ((cell >> (top - 1 - k)) & 1) << k
    parity = np.zeros(np.broadcast(nu, x).shape, dtype=np.int64)
    common = nu & digits_reversed
    while np.any(common):
        parity ^= common & 1
        common = common >> 1
    return np.where(parity == 1, -1.0, 1.0)


def _haar(nu: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(nu, x).shape)
    nu_b, x_b = np.broadcast_arrays(nu, x)
    out[nu_b == 0] = 1.0
    pos = nu_b >= 1
    if np.any(pos):
        n = nu_b[pos]
        lvl = np.floor(np.log2(n)).astype(np.int64)
        # guard against rounding in log2 at powers of two
        lvl = np.where((1 << (lvl + 1)) <= n, lvl + 1, lvl)
        lvl = np.where((1 << lvl) > n, lvl - 1, lvl)
        m = n - (1 << lvl)
        half = np.minimum(np.floor(x_b[pos] * (1 << (lvl + 1))).astype(np.int64), (1 << (lvl + 1)) - 1)
        val = np.where(half // 2 == m, np.where(half % 2 == 0, 1.0, -1.0), 0.0)
        out[pos] = val * np.exp2(lvl / 2.0)
    return out


def jacobi_log_norm(alpha: float, beta: float, nu) -> np.ndarray:
    """``ln c_nu``: the factor making ``c_nu P_nu`` orthonormal for the normalised Jacobi weight."""
    nu = np.asarray(nu, dtype=float)
    s = alpha + beta + 1.0
    log_h = (
        s * math.log(2.0)
        + gammaln(nu + alpha + 1)
        + gammaln(nu + beta + 1)
        - np.log(2 * nu + s)
        - gammaln(nu + s)
        - gammaln(nu + 1)
    )
    log_h0 = s * math.log(2.0) + gammaln(alpha + 1) + gammaln(beta + 1) - gammaln(s + 1)
    return 0.5 * (log_h0 - log_h)


def jacobi_polynomials(alpha: float, beta: float, n_max: int, x: np.ndarray) -> np.ndarray:
    """Unnormalised ``P_0, ..., P_{n_max}`` at ``x`` by the three-term recurrence; shape (n_max+1, *x.shape)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    ab = alpha + beta
    for n in range(2, n_max + 1):
        c = 2 * n + ab
        a1 = 2 * n * (n + ab) * (c - 2)
        a2 = (c - 1) * (alpha * alpha - beta * beta)
        a3 = (c - 2) * (c - 1) * c
        a4 = 2 * (n + alpha - 1) * (n + beta - 1) * c
        out[n] = ((a2 + a3 * x) * out[n - 1] - a4 * out[n - 2]) / a1
    return out


def basis_matrix(basis: BasisFamily, n_max: int, x) -> np.ndarray:
    """``[e_nu(x_i)]`` for ``nu = 0..n_max``; shape (len(x), n_max+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(basis, x)
    nu = np.arange(n_max + 1)
    if basis.kind == JACOBI:
        p = jacobi_polynomials(basis.alpha, basis.beta, n_max, x)
        return (p * np.exp(jacobi_log_norm(basis.alpha, basis.beta, nu))[:, None]).T
    return _eval(basis, nu[None, :], x[:, None])


def _eval(basis: BasisFamily, nu: np.ndarray, x: np.ndarray) -> np.ndarray:
    if basis.kind == TRIGONOMETRIC:
        return _trig(nu, x)
    if basis.kind == WALSH:
        return _walsh(nu, x)
    if basis.kind == HAAR:
        return _haar(nu, x)
    top = int(np.max(nu))
    p = jacobi_polynomials(basis.alpha, basis.beta, top, x)
    nu_b, _ = np.broadcast_arrays(nu, x)
    vals = np.take_along_axis(p, nu_b[None].astype(np.int64), axis=0)[0] if p.ndim > 1 else p[nu_b]
    return vals * np.exp(jacobi_log_norm(basis.alpha, basis.beta, nu_b))


def eval_basis(basis: BasisFamily, nu, x):
    """``e_nu(x)``; broadcasts over array arguments."""
    nu_a = np.asarray(nu)
    x_a = np.asarray(x, dtype=float)
    if np.any(nu_a < 0) or np.any(np.mod(nu_a, 1) != 0):
        raise ValueError("nu must be a non-negative integer")
    nu_a = nu_a.astype(np.int64)
    _check_domain(basis, np.atleast_1d(x_a))
    nu_b, x_b = np.broadcast_arrays(nu_a, x_a)
    out = _eval(basis, np.atleast_1d(nu_b), np.atleast_1d(x_b)).reshape(nu_b.shape)
    return out[()] if out.ndim == 0 else out


def log_sup_norm_sq(basis: BasisFamily, nu) -> np.ndarray:
    """``ln sup_x |e_nu(x)|^2`` in closed form."""
    nu = np.asarray(nu, dtype=float)
    if basis.kind in (TRIGONOMETRIC, WALSH):
        return np.zeros_like(nu)
    if basis.kind == HAAR:
        lvl = np.floor(np.log2(np.maximum(nu, 1.0)))
        return np.where(nu == 0, 0.0, lvl * math.log(2.0))
    # for max(alpha, beta) >= -1/2 the maximum of |P_nu| sits at the endpoint of the larger parameter
    q = max(basis.alpha, basis.beta)
    log_end = gammaln(nu + q + 1) - gammaln(nu + 1) - gammaln(q + 1)
    return 2.0 * (log_end + jacobi_log_norm(basis.alpha, basis.beta, nu))


def sup_norm_sq(basis: BasisFamily, nu) -> np.ndarray:
    return np.exp(log_sup_norm_sq(basis, nu))


def haar_block(level: int) -> range:
    """Indices ``I_l = {2^l, ..., 2^(l+1) - 1}``."""
    return range(1 << level, 1 << (level + 1))


# ---------------------------------------------------------------------------
# orthonormality via exact quadrature
# ---------------------------------------------------------------------------


def quadrature(basis: BasisFamily, n_max: int, n_nodes: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and probability weights integrating ``e_mu * conj(e_nu)`` exactly for ``mu, nu <= n_max``."""
    if basis.kind == JACOBI:
        n = max(n_nodes or 0, 200, n_max + 2)
        x, w = roots_jacobi(n, basis.alpha, basis.beta)
        return x, w / w.sum()
    if basis.kind == TRIGONOMETRIC:
        n = max(n_nodes or 0, 2 * n_max + 2)
        x = np.arange(n) / n
        return x, np.full(n, 1.0 / n)
    level = max(int(n_max).bit_length(), 1)
    n = 1 << level
    x = (np.arange(n) + 0.5) / n
    return x, np.full(n, 1.0 / n)


def gram_matrix(basis: BasisFamily, n_max: int) -> np.ndarray:
    x, w = quadrature(basis, n_max)
    E = basis_matrix(basis, n_max, x)
    return (E.conj().T * w) @ E


def orthonormality_defect(basis: BasisFamily, n_max: int = 64) -> float:
    """``max |<e_mu, e_nu> - delta|`` over ``mu, nu <= n_max``."""
    G = gram_matrix(basis, n_max)
    return float(np.max(np.abs(G - np.eye(n_max + 1))))


# ---------------------------------------------------------------------------
# RKHS diagnostics
# ---------------------------------------------------------------------------


@dataclass
class RKHSReport:
    """Verdict on bounded point evaluation, with truncated partial sums ``(N, S_N)``.

    ``verdict`` is None when no closed form is available.  For the infinite
    product, ``sufficient`` and ``necessary`` are the two closed-form
    conditions and ``verdict`` is set when they agree.
    """

    level: str
    verdict: bool | None
    criterion: str
    partial_sums: list[tuple[int, float]] = field(default_factory=list)
    sufficient: bool | None = None
    necessary: bool | None = None
    notes: list[str] = field(default_factory=list)


def _univariate_verdict(family: WeightFamily, two_sigma: float) -> tuple[bool | None, list[str]]:
    if family.kind == POLYNOMIAL:
        r1 = float(family.r(1))
        # nu^(2 sigma) / a_nu^(r_1) with a_nu ~ nu
        return bool(r1 > two_sigma + 1.0), [] if family.a_rule.kind in ("A1", "A2", "linear") else [
            "closed form assumes a_nu grows linearly"
        ]
    if family.kind == SUBEXPONENTIAL:
        return bool(float(family.b(1)) > 0), []
    if family.extension == "geometric":
        return None, ["tabulated family: geometric continuation, verdict from partial sums only"]
    if family.extension == "constant":
        return False, ["constant continuation leaves terms bounded below"]
    return None, ["tabulated family without continuation"]


def rkhs_condition(basis: BasisFamily, family: WeightFamily, level: str = "Univariate") -> RKHSReport:
    """Whether point evaluation is bounded, for H_1 alone or for the infinite product."""
    two_sigma = 2.0 * basis.sigma
    notes: list[str] = []
    if level not in ("Univariate", "Infinite"):
        raise ValueError("level must be 'Univariate' or 'Infinite'")
    sums = []
    for N in (10, 100, 1000, 10000):
        try:
            nu = np.arange(1, N + 1, dtype=float)
            if level == "Univariate":
                terms = -np.asarray(family.log_alpha(nu, 1), dtype=float) + two_sigma * np.log(nu)
            else:
                M = int(min(N, 1000))
                g = np.arange(1, M + 1, dtype=float)
                la = np.asarray(family.log_alpha(g[:, None], g[None, :]), dtype=float)
                terms = (-la + two_sigma * np.log(g)[:, None]).ravel()
                N = M
            sums.append((N, math.exp(_logsumexp(terms))))
        except IndexOutOfTable as exc:
            notes.append(f"partial sum at N={N} unavailable: {exc}")
            break
        if level == "Infinite" and N == 1000:
            break
    uni, extra = _univariate_verdict(family, two_sigma)
    notes += extra
    if level == "Univariate":
        crit = f"sum_nu nu^{two_sigma:g} / alpha[nu,1] < inf"
        return RKHSReport(level, uni, crit, sums, notes=notes)

    crit = f"sum_(nu,j) nu^{two_sigma:g} / alpha[nu,j] < inf"
    if family.kind not in (POLYNOMIAL, SUBEXPONENTIAL):
        return RKHSReport(level, None, crit, sums, notes=notes + ["no closed form for tabulated families"])
    dp = decay_params(family)
    col = dp.decay_alpha_1j
    sufficient = bool(uni) and col > 1
    necessary = bool(uni) and col >= 1
    verdict = sufficient if sufficient == necessary else None
    if dp.rho_is_estimate:
        notes.append("rho is a numerical estimate")
    return RKHSReport(level, verdict, crit, sums, sufficient=sufficient, necessary=necessary, notes=notes)


__all__ = [
    "BASIS_KINDS",
    "BasisFamily",
    "RKHSReport",
    "basis_matrix",
    "eval_basis",
    "gram_matrix",
    "haar_block",
    "jacobi_log_norm",
    "jacobi_polynomials",
    "log_sup_norm_sq",
    "orthonormality_defect",
    "quadrature",
    "rkhs_condition",
    "sup_norm_sq",
]
