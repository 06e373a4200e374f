"""Reproducing kernels, scalar products and anchored norms of the weighted spaces.

A function is represented by its coefficients with respect to an orthonormal
basis, ``f = sum_nu f_nu e_nu``.  The diagonal variants carry the scalar
product

    <f, g> = f_0 conj(g_0) + sum_{nu >= 1} w_nu f_nu conj(g_nu)

with ``w_nu`` the factor weights of :class:`~incsmooth.spectra.FactorWeights`,
and reproducing kernel ``1 + sum_nu w_nu^-1 e_nu(x) conj(e_nu(y))``.  The
anchored variants replace the constant-term part by ``f(a) conj(g(a))``; their
kernels are not materialised.

Kernel values are truncated series and are returned with an upper bound on
the neglected part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import gammaincc, gammaln

from incsmooth.bases import HAAR, BasisFamily, basis_matrix, eval_basis, log_sup_norm_sq, rkhs_condition
from incsmooth.errors import DomainError, NotRKHS
from incsmooth.spectra import FactorWeights, MultiIndex, base_variant
from incsmooth.weights import INF, POLYNOMIAL, SUBEXPONENTIAL, TABLE, WeightFamily, gamma, log_gamma, lower_slope

UNIVARIATE_VARIANTS = ("H", "G", "F", "Gc", "Fc")
PRODUCT_VARIANTS = ("ProductH", "ProductG", "ProductF")

# numeric part of the tail sums before switching to the analytic remainder
_TAIL_NUMERIC = 1 << 16


@dataclass(frozen=True)
class SpaceSpec:
    """One of the weighted spaces on a concrete basis.

    ``variant`` is one of ``H, G, F, Gc, Fc`` (a univariate space at
    coordinate ``j``) or ``ProductH, ProductG, ProductF``.  Series are
    truncated at ``nu_max`` per coordinate and, for products, at ``j_max``
    coordinates.
    """

    basis: BasisFamily
    family: WeightFamily
    variant: str = "H"
    j: int = 1
    c: float = 1.0
    anchor: float | None = None
    nu_max: int = 64
    j_max: int = 8

    def __post_init__(self):
        if self.variant not in UNIVARIATE_VARIANTS + PRODUCT_VARIANTS:
            raise ValueError(f"variant must be one of {UNIVARIATE_VARIANTS + PRODUCT_VARIANTS}")
        if self.nu_max < 1 or self.j_max < 1 or self.j < 1:
            raise ValueError("truncation limits and j must be at least 1")
        if not self.c > 0:
            raise ValueError("c must be positive")
        lo, hi = self.basis.domain
        if not lo <= self.anchor_point <= hi:
            raise DomainError(f"anchor {self.anchor_point} outside {self.basis.domain}")

    @property
    def anchor_point(self) -> float:
        return self.basis.default_anchor if self.anchor is None else float(self.anchor)

    @property
    def is_product(self) -> bool:
        return self.variant in PRODUCT_VARIANTS

    @property
    def factor_variant(self) -> str:
        """Diagonal variant of each factor: H, G or F."""
        return base_variant(self.variant).rstrip("c")

    @property
    def is_anchored(self) -> bool:
        return self.variant in ("Gc", "Fc")

    @property
    def effective_nu_max(self) -> int:
        return 1 if self.factor_variant == "F" else self.nu_max

    def weights(self) -> FactorWeights:
        return FactorWeights(self.family, self.factor_variant)

    def replace(self, **kw) -> "SpaceSpec":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return SpaceSpec(**d)

    @classmethod
    def from_dict(cls, spec: Mapping) -> "SpaceSpec":
        spec = dict(spec)
        return cls(
            basis=BasisFamily.from_dict(spec.pop("basis", "Trigonometric")),
            family=WeightFamily.from_dict(spec.pop("family")),
            **spec,
        )

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.to_dict(),
            "family": self.family.to_dict(),
            "variant": self.variant,
            "j": self.j,
            "c": self.c,
            "anchor": self.anchor_point,
            "nu_max": self.nu_max,
            "j_max": self.j_max,
        }


@dataclass(frozen=True)
class CoefVector:
    """Coefficients ``f_nu = <f, e_nu>_0`` for ``nu = 0, ..., len - 1``."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.atleast_1d(np.asarray(self.coeffs, dtype=complex)))

    @classmethod
    def basis_vector(cls, nu: int, n: int | None = None) -> "CoefVector":
        c = np.zeros(max(nu + 1, n or 0), dtype=complex)
        c[nu] = 1.0
        return cls(c)

    @property
    def nu_max(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "CoefVector") -> "CoefVector":
        n = max(len(self.coeffs), len(other.coeffs))
        return CoefVector(np.pad(self.coeffs, (0, n - len(self.coeffs))) + np.pad(other.coeffs, (0, n - len(other.coeffs))))

    def __sub__(self, other: "CoefVector") -> "CoefVector":
        return self + CoefVector(-other.coeffs)

    def __mul__(self, s: complex) -> "CoefVector":
        return CoefVector(self.coeffs * s)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ProductCoefVector:
    """Finitely many coefficients ``f_nu`` indexed by multi-indices ``((j, nu_j), ...)``."""

    terms: Mapping[MultiIndex, complex]

    def __post_init__(self):
        clean = {}
        for idx, v in self.terms.items():
            idx = tuple(sorted((int(j), int(n)) for j, n in idx if n != 0))
            clean[idx] = clean.get(idx, 0.0) + complex(v)
        object.__setattr__(self, "terms", clean)


# ---------------------------------------------------------------------------
# univariate kernel and tails
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelValue:
    value: complex
    tail_bound: float


def _require_rkhs(space: SpaceSpec) -> None:
    if space.factor_variant == "F":
        return
    report = rkhs_condition(space.basis, space.family, "Univariate")
    if report.verdict is False:
        raise NotRKHS(
            f"point evaluation is unbounded on {space.variant} over {space.basis.describe()}: "
            f"{report.criterion} fails"
        )


def _log_w(space: SpaceSpec, nu: np.ndarray, j: int) -> np.ndarray:
    return space.weights().array(nu, np.full_like(nu, j))


def _remainder(space: SpaceSpec, j: int, M: int) -> float:
    """Analytic bound on ``sum_{nu > M} w_nu^-1 sup|e_nu|^2``."""
    fam = space.family
    basis = space.basis
    w = space.weights()
    # w_nu = alpha[nu, j] for H and alpha[nu, 1] / gamma_j for G; both are alpha[nu, k] times a constant
    k = j if space.factor_variant == "H" else 1
    shift = float(w(1, j)) - float(fam.log_alpha(1, k))
    if basis.kind == HAAR:
        p, K = 1.0, 1.0  # sup|e_nu|^2 = 2^l <= nu
    else:
        p = 2.0 * basis.sigma
        lo = np.arange(max(M // 2, 1), M + 1, dtype=float)
        K = float(np.max(np.exp(log_sup_norm_sq(basis, lo) - p * np.log(lo)))) if p > 0 else 1.0
    if fam.kind == POLYNOMIAL:
        r = float(fam.r(k))
        kappa, _ = lower_slope(fam.a_rule)
        if r <= p + 1 or kappa <= 0:
            return INF
        log_rem = math.log(K) - r * math.log(kappa) + (p - r + 1) * math.log(M) - math.log(r - p - 1)
        return math.exp(log_rem - shift)
    if fam.kind == SUBEXPONENTIAL:
        b = float(fam.b(k))
        lam = float(fam.r(k)) * math.log(fam.a_base)
        if b <= 0:
            return INF
        s = (p + 1) / b
        # int_M^inf x^p exp(-lam x^b) dx
        log_int = math.log(max(gammaincc(s, lam * M**b), 1e-300)) + gammaln(s) - math.log(b) - s * math.log(lam)
        return math.exp(math.log(K) + log_int - shift)
    if fam.extension == "none":
        return 0.0
    if fam.extension == "constant":
        return INF
    # geometric continuation: terms shrink by a fixed ratio per step
    t = np.exp(-np.asarray(w.array(np.array([M - 1, M]), np.array([j, j]))))
    q = t[1] / t[0] * (1.0 + 1.0 / M) ** p
    return INF if q >= 1 else K * M**p * t[1] * q / (1 - q)


def _table_limit(space: SpaceSpec) -> int | None:
    if space.family.kind == TABLE and space.family.extension == "none":
        return space.family.table_shape[0]
    return None


def univariate_tail(space: SpaceSpec, nu_max: int, j: int | None = None) -> float:
    """Upper bound on ``sup_x sum_{nu > nu_max} w_nu^-1 |e_nu(x)|^2`` at coordinate ``j``."""
    j = space.j if j is None else j
    if space.factor_variant == "F":
        if nu_max >= 1:
            return 0.0
        return float(np.exp(-_log_w(space, np.array([1]), j)[0] + log_sup_norm_sq(space.basis, 1)))
    limit = _table_limit(space)
    M = max(4 * nu_max, _TAIL_NUMERIC)
    if limit is not None:
        M = limit
    if M <= nu_max:
        return 0.0
    nu = np.arange(nu_max + 1, M + 1)
    lw = _log_w(space, nu, j)
    if space.basis.kind == HAAR:
        # one nonzero function per dyadic block; the smallest weight in the block dominates
        lvl = np.floor(np.log2(nu)).astype(int)
        first = np.r_[True, lvl[1:] != lvl[:-1]]
        terms = np.exp(-lw[first] + lvl[first] * math.log(2.0))
    else:
        terms = np.exp(-lw + log_sup_norm_sq(space.basis, nu))
    return float(math.fsum(terms) + _remainder(space, j, M))


def kernel_coefficients(space: SpaceSpec, j: int | None = None, nu_max: int | None = None) -> np.ndarray:
    """``[1, w_1^-1, ..., w_N^-1]`` for the diagonal variant at coordinate ``j``."""
    j = space.j if j is None else j
    n = space.nu_max if nu_max is None else nu_max
    if space.factor_variant == "F":
        n = 1
    limit = _table_limit(space)
    if limit is not None:
        n = min(n, limit)
    nu = np.arange(1, n + 1)
    return np.r_[1.0, np.exp(-_log_w(space, nu, j))]


def _factor_kernel(space: SpaceSpec, x, y, j: int, nu_max: int) -> np.ndarray:
    lam = kernel_coefficients(space, j, nu_max)
    n = len(lam) - 1
    Ex = basis_matrix(space.basis, n, x)
    Ey = basis_matrix(space.basis, n, y)
    # real arithmetic, summed in a fixed order, keeps K(x, y) = conj(K(y, x)) exact
    xr, yr = Ex.real[:, None, :], Ey.real[None, :, :]
    if not space.basis.is_complex:
        return np.sum(lam * (xr * yr), axis=-1)
    xi, yi = Ex.imag[:, None, :], Ey.imag[None, :, :]
    re = np.sum(lam * (xr * yr + xi * yi), axis=-1)
    im = np.sum(lam * (xi * yr - xr * yi), axis=-1)
    return re + 1j * im


def kernel_eval(space: SpaceSpec, x, y, nu_max: int | None = None, j_max: int | None = None) -> KernelValue:
    """Truncated kernel ``K(x, y)`` with a bound on the neglected terms.

    For product variants ``x`` and ``y`` hold the first coordinates of points
    in ``D^N``; missing coordinates up to ``j_max`` are set to the anchor and
    coordinates beyond ``j_max`` enter only through the tail bound.
    """
    if space.is_anchored:
        raise NotImplementedError("anchored kernels are not materialised; use the anchored norms instead")
    _require_rkhs(space)
    nu_max = space.nu_max if nu_max is None else nu_max
    if not space.is_product:
        val = complex(_factor_kernel(space, [x], [y], space.j, nu_max)[0, 0])
        return KernelValue(_real_if_possible(val, space), univariate_tail(space, nu_max))
    J = space.j_max if j_max is None else j_max
    xs = _coords(space, x, J)
    ys = _coords(space, y, J)
    prod = 1.0 + 0j
    inflated = 1.0
    for j in range(1, J + 1):
        kj = complex(_factor_kernel(space, [xs[j - 1]], [ys[j - 1]], j, nu_max)[0, 0])
        prod *= kj
        inflated *= abs(kj) + univariate_tail(space, nu_max, j)
    tail = inflated * math.exp(coordinate_tail(space, J)) - abs(prod)
    return KernelValue(_real_if_possible(prod, space), max(tail, 0.0))


def _real_if_possible(v: complex, space: SpaceSpec) -> complex | float:
    return v if space.basis.is_complex else float(v.real)


def _coords(space: SpaceSpec, x, J: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(x) > J:
        raise ValueError(f"point has {len(x)} coordinates, truncation keeps {J}")
    return np.r_[x, np.full(J - len(x), space.anchor_point)]


def _sup_first_factor(space: SpaceSpec) -> float:
    """``sup_x (k_1(x, x) - 1)`` for the H_1 weights."""
    s1 = space.replace(variant="H", j=1)
    lam = kernel_coefficients(s1, 1, space.nu_max)
    basis = space.basis
    nu = np.arange(1, len(lam))
    if basis.kind == HAAR:
        lvl = np.floor(np.log2(nu)).astype(int)
        first = np.r_[True, lvl[1:] != lvl[:-1]]
        head = float(np.sum(lam[1:][first] * np.exp2(lvl[first])))
    else:
        head = float(np.sum(lam[1:] * np.exp(log_sup_norm_sq(basis, nu))))
    return head + univariate_tail(s1, len(lam) - 1, 1)


def coordinate_tail(space: SpaceSpec, J: int) -> float:
    """Upper bound on ``sum_{j > J} sup_x (k_j(x, x) - 1)``.

    Uses ``alpha[nu, j]^-1 <= gamma_j alpha[nu, 1]^-1`` for H and G, and
    ``sup|e_1|^2 / alpha[1, j]`` for F.  The sum over j is taken numerically
    up to a cut-off and continued by the local power law beyond it.
    """
    fv = space.factor_variant
    fam = space.family
    J2 = max(4 * J, _TAIL_NUMERIC)
    j = np.arange(J + 1, J2 + 1)
    if fv == "F":
        per = np.exp(-np.asarray(fam.log_alpha(np.ones_like(j), j), dtype=float))
        scale = float(np.exp(log_sup_norm_sq(space.basis, 1)))
    else:
        per = np.exp(np.asarray(log_gamma(fam, j), dtype=float))
        scale = _sup_first_factor(space)
    head = math.fsum(per)
    half = per[len(per) // 2 - 1] if len(per) > 1 else per[0]
    last = per[-1]
    if last == 0 or head == 0:
        return scale * head
    p = math.log(half / last) / math.log(J2 / (J2 // 2)) if half > last else 0.0
    rem = INF if p <= 1 else last * J2 / (p - 1)
    return scale * (head + rem)


# ---------------------------------------------------------------------------
# scalar products and norms
# ---------------------------------------------------------------------------


def evaluate(space: SpaceSpec, f, x) -> complex | float:
    """Point value ``f(x)`` of a finite expansion."""
    if isinstance(f, ProductCoefVector):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        total = 0j
        for idx, v in f.terms.items():
            term = v
            for j, nu in idx:
                xj = xs[j - 1] if j <= len(xs) else space.anchor_point
                term *= complex(eval_basis(space.basis, nu, xj))
            total += term
        return _real_if_possible(total, space)
    E = basis_matrix(space.basis, f.nu_max, [x])[0]
    return _real_if_possible(complex(E @ f.coeffs), space)


def _check_support(space: SpaceSpec, f: CoefVector) -> None:
    if space.factor_variant == "F" and np.any(f.coeffs[2:] != 0):
        raise ValueError("F spaces are spanned by e_0 and e_1")


def _weights_upto(space: SpaceSpec, n: int, j: int) -> np.ndarray:
    return np.exp(_log_w(space, np.arange(1, n), j))


def inner(space: SpaceSpec, f, g) -> complex:
    """Scalar product of the space."""
    if space.is_product:
        return _product_inner(space, f, g)
    _check_support(space, f)
    _check_support(space, g)
    n = max(len(f.coeffs), len(g.coeffs))
    fc = np.pad(f.coeffs, (0, n - len(f.coeffs)))
    gc = np.pad(g.coeffs, (0, n - len(g.coeffs)))
    if space.is_anchored:
        _require_rkhs(space)
        a = space.anchor_point
        head = complex(evaluate(space, CoefVector(fc), a)) * np.conj(complex(evaluate(space, CoefVector(gc), a)))
        lw = _anchored_log_weights(space, n)
        return complex(head + np.sum(np.exp(lw) * fc[1:] * np.conj(gc[1:])))
    w = _weights_upto(space, n, space.j)
    return complex(fc[0] * np.conj(gc[0]) + np.sum(w * fc[1:] * np.conj(gc[1:])))


def _anchored_log_weights(space: SpaceSpec, n: int) -> np.ndarray:
    nu = np.arange(1, n)
    base = space.replace(variant=space.factor_variant)
    return _log_w(base, nu, space.j) - math.log(space.c)


def _product_inner(space: SpaceSpec, f: ProductCoefVector, g: ProductCoefVector) -> complex:
    w = space.weights()
    total = 0j
    for idx, v in f.terms.items():
        u = g.terms.get(idx)
        if u is None:
            continue
        if w.max_nu is not None and any(nu > w.max_nu for _, nu in idx):
            raise ValueError("F spaces are spanned by e_0 and e_1 in every coordinate")
        total += math.exp(math.fsum(w(nu, j) for j, nu in idx)) * v * np.conj(u)
    return complex(total)


def norm(space: SpaceSpec, f) -> float:
    return math.sqrt(max(inner(space, f, f).real, 0.0))


def l2_norm(f) -> float:
    """``||f||_0``, the norm in L2(mu0)."""
    if isinstance(f, ProductCoefVector):
        return math.sqrt(sum(abs(v) ** 2 for v in f.terms.values()))
    return float(np.linalg.norm(f.coeffs))


def kernel_section(space: SpaceSpec, y, nu_max: int | None = None) -> CoefVector:
    """Coefficients of the truncated ``k(., y)``."""
    if space.is_product or space.is_anchored:
        raise NotImplementedError("kernel sections are available for the univariate diagonal variants")
    lam = kernel_coefficients(space, space.j, nu_max or space.nu_max)
    E = basis_matrix(space.basis, len(lam) - 1, [y])[0]
    return CoefVector(lam * np.conj(E))


def reproducing_residual(space: SpaceSpec, f: CoefVector, ys: Sequence[float]) -> float:
    """``max_y |<f, k(., y)> - f(y)|`` with the kernel truncated at the support of f."""
    worst = 0.0
    for y in ys:
        k = kernel_section(space, y, nu_max=max(f.nu_max, 1))
        worst = max(worst, abs(inner(space, f, k) - complex(evaluate(space, f, y))))
    return worst


def gram_matrix(space: SpaceSpec, points) -> np.ndarray:
    pts = list(points)
    if not space.is_product:
        _require_rkhs(space)
        K = _factor_kernel(space, np.asarray(pts, dtype=float), np.asarray(pts, dtype=float), space.j, space.nu_max)
        return K if space.basis.is_complex else K.real
    n = len(pts)
    K = np.ones((n, n), dtype=complex)
    coords = [_coords(space, p, space.j_max) for p in pts]
    X = np.array(coords)
    for j in range(1, space.j_max + 1):
        K *= _factor_kernel(space, X[:, j - 1], X[:, j - 1], j, space.nu_max)
    return K if space.basis.is_complex else K.real


def gram_psd_check(space: SpaceSpec, points, tol: float = 1e-10) -> tuple[float, bool]:
    """Smallest eigenvalue of the kernel matrix at ``points`` and whether it is ``>= -tol``."""
    K = gram_matrix(space, points)
    lam = float(np.min(np.linalg.eigvalsh(K)))
    return lam, lam >= -tol


# ---------------------------------------------------------------------------
# equivalence of the diagonal and anchored norms
# ---------------------------------------------------------------------------


@dataclass
class EquivalenceCheck:
    """Per-``c0`` pass counts of the three norm inequalities on a sample.

    ``threshold`` is the largest ``c0`` of the grid for which every sample
    satisfies all three; it is an empirical, sample-based value.
    """

    kind: str
    j: int
    weight: float
    grid: list[float]
    lower_ok: dict[float, int]
    upper_ok: dict[float, int]
    l2_ok: dict[float, int]
    n_samples: int
    threshold: float | None
    worst_ratios: dict[float, tuple[float, float, float]] = field(default_factory=dict)

    def all_hold(self, c0: float) -> bool:
        n = self.n_samples
        return self.lower_ok[c0] == n and self.upper_ok[c0] == n and self.l2_ok[c0] == n


def _equivalence(
    kind: str,
    family: WeightFamily,
    basis: BasisFamily,
    j: int,
    c0_grid: Sequence[float],
    sample_fs: Sequence[CoefVector],
    anchor: float | None,
    rtol: float,
) -> EquivalenceCheck:
    if kind == "G":
        weight = gamma(family, j)
    else:
        weight = math.exp(-float(family.log_alpha(1, j)))
    nu_max = max(max(f.nu_max for f in sample_fs), 1)
    plain = SpaceSpec(basis, family, kind, j=j, anchor=anchor, nu_max=nu_max)
    lower_ok, upper_ok, l2_ok, worst = {}, {}, {}, {}
    for c0 in c0_grid:
        if not 0 < c0 < 1:
            raise ValueError("c0 must lie in (0, 1)")
        inv = plain.replace(variant=kind + "c", c=1.0 / c0)
        fwd = plain.replace(variant=kind + "c", c=c0)
        lo = up = l2 = 0
        w_lo = w_up = w_l2 = 0.0
        for f in sample_fs:
            n_plain = norm(plain, f)
            n_inv = norm(inv, f)
            n_fwd = norm(fwd, f)
            n0 = l2_norm(f)
            left = (1 + weight / c0) ** -0.5 * n_inv
            right = (1 + weight) ** 0.5 * n_fwd
            top = (1 + weight / c0**2) * n_inv
            slack = rtol * max(n_plain, n0, 1e-300)
            lo += left <= n_plain + slack
            up += n_plain <= right + slack
            l2 += n0 <= top + slack
            w_lo = max(w_lo, left / n_plain if n_plain else 0.0)
            w_up = max(w_up, n_plain / right if right else INF)
            w_l2 = max(w_l2, n0 / top if top else INF)
        lower_ok[c0], upper_ok[c0], l2_ok[c0] = lo, up, l2
        worst[c0] = (w_lo, w_up, w_l2)
    rep = EquivalenceCheck(kind, j, weight, list(c0_grid), lower_ok, upper_ok, l2_ok, len(sample_fs), None, worst)
    passing = [c0 for c0 in c0_grid if rep.all_hold(c0)]
    rep.threshold = max(passing) if passing else None
    return rep


def verify_lw2(
    family: WeightFamily,
    j: int,
    c0_grid: Sequence[float],
    sample_fs: Sequence[CoefVector],
    basis: BasisFamily | None = None,
    anchor: float | None = None,
    rtol: float = 1e-12,
) -> EquivalenceCheck:
    """Check the G_j versus anchored G_j^c norm inequalities on sample functions."""
    return _equivalence("G", family, basis or BasisFamily.trigonometric(), j, c0_grid, sample_fs, anchor, rtol)


def verify_l200(
    family: WeightFamily,
    j: int,
    c0_grid: Sequence[float],
    sample_fs: Sequence[CoefVector],
    basis: BasisFamily | None = None,
    anchor: float | None = None,
    rtol: float = 1e-12,
) -> EquivalenceCheck:
    """The F_j analogue of :func:`verify_lw2`, with ``1/alpha[1,j]`` in place of ``gamma_j``."""
    fs = [CoefVector(f.coeffs[:2]) for f in sample_fs]
    return _equivalence("F", family, basis or BasisFamily.trigonometric(), j, c0_grid, fs, anchor, rtol)


def norm_chain(family: WeightFamily, basis: BasisFamily, f: ProductCoefVector) -> tuple[float, float, float | None]:
    """``(||f||_G, ||f||_H, ||f||_F)``; the F norm is None unless f lies in F."""
    g = norm(SpaceSpec(basis, family, "ProductG"), f)
    h = norm(SpaceSpec(basis, family, "ProductH"), f)
    in_f = all(nu <= 1 for idx in f.terms for _, nu in idx)
    fn = norm(SpaceSpec(basis, family, "ProductF"), f) if in_f else None
    return g, h, fn
