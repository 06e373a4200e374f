"""Decay of positive sequences and summability over multi-indices.

The decay of a positive sequence ``x`` is ``sup{tau > 0 : sum x_i^(1/tau) < inf}``
(0 for the empty set), which equals ``liminf ln(1/x_i) / ln(i)`` whenever
either side is positive.  Finite data cannot determine a liminf, so
:func:`decay_fit` returns a log-log slope plus residual and never claims
the exact value.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from incsmooth.errors import DegenerateWindow, Divergent
from incsmooth.weights import INF, POLYNOMIAL, SUBEXPONENTIAL, WeightFamily, decay_params, lower_slope

# multi-index count below which product_sum also sums term by term
DIRECT_SUM_LIMIT = 10**7
OVERFLOW_THRESHOLD = 1e300


class Verdict(str, enum.Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    BOUNDARY = "boundary"  # the closed-form criterion sits exactly on its threshold
    UNKNOWN = "unknown"


@dataclass
class PositiveSequence:
    """A positive sequence given by a vectorised rule or by finitely many values.

    Terms are indexed from ``start`` (default 1).  ``decay`` and ``liminf``
    are optional declared closed forms; ``summable`` records analytic
    knowledge of ``sum exp(-x_j)`` for the borderline cases.
    """

    rule: Callable[[np.ndarray], np.ndarray] | None = None
    values: np.ndarray | None = None
    start: int = 1
    decay: float | None = None
    liminf: float | None = None
    summable: bool | None = None

    def __post_init__(self):
        if (self.rule is None) == (self.values is None):
            raise ValueError("give exactly one of rule or values")
        if self.values is not None:
            self.values = np.asarray(self.values, dtype=float)
            if np.any(self.values <= 0):
                raise ValueError("sequence terms must be strictly positive")

    @property
    def stop(self) -> float:
        """One past the last available index (``inf`` for rules)."""
        if self.values is None:
            return INF
        return self.start + len(self.values)

    def terms(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.values is not None:
            if np.any(idx < self.start) or np.any(idx >= self.stop):
                raise IndexError("index outside the stored terms")
            return self.values[idx - self.start]
        out = np.asarray(self.rule(idx.astype(float)), dtype=float)
        return np.broadcast_to(out, idx.shape).copy()


def as_sequence(x) -> PositiveSequence:
    if isinstance(x, PositiveSequence):
        return x
    if callable(x):
        return PositiveSequence(rule=x)
    return PositiveSequence(values=np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# decay fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    slope: float
    residual: float
    n_points: int
    window: tuple[int, int]


def log_window(i_min: int, i_max: int, n_samples: int | None = 256) -> np.ndarray:
    """Distinct integers in ``[i_min, i_max]``, log-spaced (all of them if few)."""
    if n_samples is None or i_max - i_min + 1 <= n_samples:
        return np.arange(i_min, i_max + 1, dtype=np.int64)
    return np.unique(np.round(np.geomspace(i_min, i_max, n_samples)).astype(np.int64))


def decay_fit(x, i_min: int = 10, i_max: int | None = None, n_samples: int | None = 256) -> DecayFit:
    """Least-squares slope of ``ln(1/x_i)`` against ``ln(i)`` over ``[i_min, i_max]``.

    Samples are log-spaced so that every scale carries equal weight.  The
    residual is the Euclidean norm of the fit residuals.
    """
    seq = as_sequence(x)
    if i_max is None:
        if seq.values is None:
            raise ValueError("i_max is required for rule-based sequences")
        i_max = int(seq.stop) - 1
    i_min = max(int(i_min), seq.start, 1)
    if i_max <= i_min:
        raise DegenerateWindow(f"empty fit window [{i_min}, {i_max}]")
    idx = log_window(i_min, int(i_max), n_samples)
    if len(idx) < 3:
        raise DegenerateWindow(f"window [{i_min}, {i_max}] holds fewer than 3 points")
    xs = np.log(idx.astype(float))
    ys = -np.log(seq.terms(idx))
    A = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.linalg.norm(A @ coef - ys))
    return DecayFit(slope=float(coef[0]), residual=resid, n_points=len(idx), window=(i_min, int(i_max)))


# ---------------------------------------------------------------------------
# product / sum identity over multi-indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductSumResult:
    product: float
    direct: float | None
    n_indices: int
    agree: bool | None


def _as_terms(beta: Sequence[Sequence[float]], j_max: int | None) -> list[np.ndarray]:
    terms = [np.asarray(b, dtype=float) for b in beta]
    if j_max is not None:
        terms = terms[:j_max] + [np.zeros(0)] * max(0, j_max - len(terms))
    return terms


def product_side(beta: Sequence[Sequence[float]], j_max: int | None = None) -> float:
    """``prod_j (1 + sum_nu beta[j][nu])`` with a divergence guard on the absolute sum."""
    terms = _as_terms(beta, j_max)
    abs_total = math.fsum(float(np.sum(np.abs(t))) for t in terms)
    if not abs_total < OVERFLOW_THRESHOLD:
        raise Divergent(f"sum of |beta| over the truncation is {abs_total:g}")
    out = 1.0
    for t in terms:
        out *= 1.0 + math.fsum(t.tolist())
    return out


def direct_sum(beta: Sequence[Sequence[float]], j_max: int | None = None, min_term: float = 0.0) -> float:
    """Term-by-term sum of ``beta_nu = prod_j beta[j][nu_j]`` over all multi-indices.

    With ``min_term = 0`` every multi-index of the truncation is visited.  A
    positive ``min_term`` prunes subtrees whose partial product is already
    below it in absolute value; this is exact for terms with ``|beta| <= 1``
    up to the discarded mass and makes long truncations tractable.
    """
    terms = _as_terms(beta, j_max)
    if min_term <= 0.0:
        count = 1
        for t in terms:
            count *= len(t) + 1
        if count > DIRECT_SUM_LIMIT:
            raise ValueError(f"{count} multi-indices exceed the direct-sum limit")
        # expand the full table of multi-index terms one coordinate at a time
        table = np.ones(1)
        for t in terms:
            table = np.concatenate([table, np.multiply.outer(table, t).ravel()])
        return math.fsum(table.tolist())

    acc: list[float] = []
    # largest terms first so that each row can be cut off at the first small product
    rows = [sorted(t.tolist(), key=abs, reverse=True) for t in terms]
    row_max = [abs(r[0]) if r else 0.0 for r in rows]

    def visit(k: int, partial: float) -> None:
        acc.append(partial)
        for jj in range(k, len(rows)):
            if abs(partial) * row_max[jj] < min_term:
                continue
            for b in rows[jj]:
                nxt = partial * b
                if abs(nxt) < min_term:
                    break
                visit(jj + 1, nxt)

    visit(0, 1.0)
    return math.fsum(acc)


def product_sum(
    beta: Sequence[Sequence[float]], j_max: int | None = None, tol: float = 1e-10
) -> ProductSumResult:
    """Evaluate ``prod_j (1 + sum_nu beta[j][nu])`` and, when feasible, the direct multi-index sum.

    ``beta[j - 1]`` lists ``beta_{nu, j}`` for ``nu = 1, 2, ...`` (``beta_{0, j} = 1``
    is implied).  ``agree`` compares both sides at relative tolerance ``tol``;
    it is ``None`` when the truncation has more than ``DIRECT_SUM_LIMIT``
    multi-indices.
    """
    terms = _as_terms(beta, j_max)
    prod = product_side(terms)
    count = 1
    for t in terms:
        count *= len(t) + 1
    if count > DIRECT_SUM_LIMIT:
        return ProductSumResult(prod, None, count, None)
    direct = direct_sum(terms)
    agree = abs(prod - direct) <= tol * max(abs(prod), abs(direct), 1e-300)
    return ProductSumResult(prod, direct, count, bool(agree))


# ---------------------------------------------------------------------------
# summability lemmas
# ---------------------------------------------------------------------------


def exp_sum_verdict(q: float) -> Verdict:
    """Verdict on ``sum_j exp(-q_j)`` from ``q = liminf q_j / ln j``."""
    if q > 1:
        return Verdict.CONVERGENT
    if q < 1:
        return Verdict.DIVERGENT
    return Verdict.BOUNDARY


@dataclass
class EquivalenceReport:
    """Truncated sums and verdicts for the double sum, its nu = 1 row and j = 1 column."""

    tau: float
    sigma: float
    trunc: int
    double_sum: float
    row_sum: float
    column_sum: float
    double_verdict: Verdict
    row_verdict: Verdict
    column_verdict: Verdict
    g5: bool | None
    equivalence_holds: bool | None
    notes: list[str] = field(default_factory=list)


def _logsumexp(x: np.ndarray) -> float:
    m = float(np.max(x))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(x - m))))


def check_l4(family: WeightFamily, tau: float, sigma: float, trunc: int = 1000) -> EquivalenceReport:
    """Truncated versions of the three sums related by the double-sum splitting lemma.

    ``sum_{nu,j} alpha^-tau nu^sigma`` is finite iff both the row sum
    ``sum_nu alpha[nu,1]^-tau nu^sigma`` and the column sum
    ``sum_j alpha[1,j]^-tau`` are, provided g5 holds.  Verdicts come from
    closed-form criteria; C1 makes divergence of either single sum force
    divergence of the double sum without g5.
    """
    if tau <= 0 or sigma < 0:
        raise ValueError("need tau > 0 and sigma >= 0")
    nu = np.arange(1, trunc + 1, dtype=float)
    lnu = np.log(nu)
    la = np.asarray(family.log_alpha(nu[:, None], nu[None, :])).reshape(trunc, trunc)
    double = _logsumexp((-tau * la + sigma * lnu[:, None]).ravel())
    row = _logsumexp(-tau * la[:, 0] + sigma * lnu)
    col = _logsumexp(-tau * la[0, :])
    notes: list[str] = []

    row_v = col_v = Verdict.UNKNOWN
    g5: bool | None = None
    if family.kind in (POLYNOMIAL, SUBEXPONENTIAL):
        dp = decay_params(family)
        if family.kind == POLYNOMIAL:
            _, exact = lower_slope(family.a_rule)
            if not exact:
                notes.append("row verdict assumes a_nu ~ nu")
            # alpha[nu,1]^-tau nu^sigma ~ nu^(sigma - tau r_1)
            row_v = Verdict.CONVERGENT if tau * dp.decay_alpha_nu1 > sigma + 1 else Verdict.DIVERGENT
            g5 = dp.rho > 0
        else:
            row_v = Verdict.CONVERGENT
            g5 = True if dp.rho > 0 else None
        # column: sum_j exp(-tau * r_j * ln a_1), liminf of the exponent over ln j is tau * decay
        col_v = exp_sum_verdict(tau * dp.decay_alpha_1j) if dp.decay_alpha_1j < INF else Verdict.CONVERGENT
        if dp.rho_is_estimate:
            notes.append("rho is a numerical estimate")
    else:
        notes.append("tabulated family: truncated sums only")

    if Verdict.DIVERGENT in (row_v, col_v):
        double_v = Verdict.DIVERGENT
    elif row_v == col_v == Verdict.CONVERGENT and g5:
        double_v = Verdict.CONVERGENT
    elif Verdict.UNKNOWN in (row_v, col_v):
        double_v = Verdict.UNKNOWN
    else:
        double_v = Verdict.BOUNDARY
    equivalence = None
    if Verdict.UNKNOWN not in (row_v, col_v, double_v) and Verdict.BOUNDARY not in (row_v, col_v, double_v):
        equivalence = (double_v == Verdict.CONVERGENT) == (row_v == col_v == Verdict.CONVERGENT)
    return EquivalenceReport(
        tau=tau,
        sigma=sigma,
        trunc=trunc,
        double_sum=math.exp(double),
        row_sum=math.exp(row),
        column_sum=math.exp(col),
        double_verdict=double_v,
        row_verdict=row_v,
        column_verdict=col_v,
        g5=g5,
        equivalence_holds=equivalence,
        notes=notes,
    )


@dataclass
class L5Report:
    q_liminf_estimate: float
    partial_sum: float
    verdict: Verdict
    doubling_increments: list[float]


def running_liminf(q: PositiveSequence, j_max: int, n_windows: int = 4) -> float:
    """Minimum of ``q_j / ln j`` over the last dyadic window ``[j_max/2, j_max]``.

    Earlier windows are computed too; the estimate for the largest window is returned.
    """
    lo = max(q.start, 2)
    est = INF
    J = max(lo * 2, j_max >> n_windows)
    while J <= j_max:
        idx = log_window(max(lo, J // 2), J, 2048)
        est = float(np.min(q.terms(idx) / np.log(idx)))
        J *= 2
    return est


def _partial_sums(q: PositiveSequence, j_max: int, chunk: int = 1 << 20) -> tuple[float, list[float]]:
    """``sum_{j <= j_max} exp(-q_j)`` and its sums over the dyadic blocks ``[2^k, 2^(k+1))``."""
    blocks: list[float] = []
    lo = 1
    while lo <= j_max:
        hi = min(2 * lo - 1, j_max)
        acc = []
        for a in range(max(lo, q.start), hi + 1, chunk):
            idx = np.arange(a, min(a + chunk - 1, hi) + 1, dtype=np.int64)
            acc.append(math.fsum(np.exp(-q.terms(idx)).tolist()))
        blocks.append(math.fsum(acc))
        lo *= 2
    return math.fsum(blocks), blocks


def check_l5(q, j_max: int = 10**6) -> L5Report:
    """Summability of ``exp(-q_j)`` against the liminf of ``q_j / ln j``.

    ``q > 1`` implies convergence and convergence implies ``q >= 1``.  At the
    boundary ``q = 1`` the verdict falls back to the declared ``summable``
    flag when present.  ``doubling_increments`` are the sums over
    ``[2^k, 2^(k+1))``; a divergent trend shows as increments that do not shrink.
    """
    q = as_sequence(q)
    est = running_liminf(q, j_max)
    partial, blocks = _partial_sums(q, j_max)
    if q.liminf is not None:
        verdict = exp_sum_verdict(q.liminf)
        if verdict is Verdict.BOUNDARY and q.summable is not None:
            verdict = Verdict.CONVERGENT if q.summable else Verdict.DIVERGENT
    else:
        verdict = Verdict.UNKNOWN
    return L5Report(q_liminf_estimate=est, partial_sum=partial, verdict=verdict, doubling_increments=blocks)


def summability_grid(family: WeightFamily, taus: Sequence[float], sigmas: Sequence[float], trunc: int = 500):
    """``check_l4`` over a grid of (tau, sigma)."""
    return [check_l4(family, t, s, trunc) for t, s in itertools.product(taus, sigmas)]
