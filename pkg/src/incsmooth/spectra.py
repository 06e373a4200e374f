"""Singular values of tensor-product embeddings and the decay of minimal errors.

The embedding of the tensor product space into L2 has singular values
``prod_j w(nu_j, j) ** -1/2`` over finitely supported multi-indices, with
factor weights ``w`` depending on the space variant:

============  ==========================================
``H``         ``alpha[nu, j]``
``G``         ``alpha[nu, 1] / gamma_j``
``F``         ``alpha[1, j]``, values restricted to {0, 1}
``Gc``        ``alpha[nu, 1] / (c * gamma_j)``
``Fc``        ``alpha[1, j] / c``, values restricted to {0, 1}
============  ==========================================

:class:`SingularValueStream` enumerates them lazily in non-increasing order
by best-first search over a spanning tree of the multi-indices.  Each
multi-index has a unique parent of no larger weight, so the frontier heap
always holds the next value.  Coordinates beyond ``max_coordinate`` are
never generated; an emission is only released once its weight is provably
below every multi-index that would need such a coordinate.

Ties (relative tolerance ``1e-12`` in log space) are released in the order
of ``(support size, coordinates, values)``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from incsmooth.errors import CoordinateHorizonExceeded, NonMonotoneWeights
from incsmooth.weights import INF, DecayParams, WeightFamily, decay_params, log_gamma

MultiIndex = tuple  # tuple of (j, nu) pairs, j strictly increasing, nu >= 1

VARIANTS = ("H", "G", "F", "Gc", "Fc")
_PRODUCT_ALIASES = {"ProductH": "H", "ProductG": "G", "ProductF": "F"}
TIE_BREAK_RULE = "non-increasing xi; ties (rel. 1e-12 in log weight) by (support size, coordinates, values)"
TIE_TOL = 1e-12


def base_variant(variant: str) -> str:
    v = _PRODUCT_ALIASES.get(variant, variant)
    if v not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return v


def tie_key(index: MultiIndex) -> tuple:
    return (len(index), tuple(j for j, _ in index), tuple(v for _, v in index))


def index_to_json(index: MultiIndex) -> list[list[int]]:
    return [[int(j), int(v)] for j, v in index]


# ---------------------------------------------------------------------------
# factor weights
# ---------------------------------------------------------------------------


class FactorWeights:
    """Log factor weights ``ln w(nu, j)`` for ``nu, j >= 1`` of one space variant."""

    def __init__(self, family: WeightFamily, variant: str = "H", c: float = 1.0):
        self.family = family
        self.variant = base_variant(variant)
        if self.variant in ("Gc", "Fc") and not c > 0:
            raise ValueError("anchored variants need c > 0")
        self.c = float(c) if self.variant in ("Gc", "Fc") else 1.0
        self.max_nu = 1 if self.variant in ("F", "Fc") else None
        self._log_c = math.log(self.c)
        self._cache: dict[tuple[int, int], float] = {}

    def __call__(self, nu: int, j: int) -> float:
        key = (nu, j)
        w = self._cache.get(key)
        if w is None:
            w = self._compute(nu, j)
            if len(self._cache) < 1 << 20:
                self._cache[key] = w
        return w

    def _compute(self, nu: int, j: int) -> float:
        f = self.family
        v = self.variant
        if self.max_nu is not None and nu > self.max_nu:
            return INF
        if v == "H":
            return float(f.log_alpha(nu, j))
        if v in ("G", "Gc"):
            return float(f.log_alpha(nu, 1)) - float(log_gamma(f, j)) - self._log_c
        return float(f.log_alpha(1, j)) - self._log_c

    def array(self, nu, j) -> np.ndarray:
        """Vectorised version of :meth:`__call__`."""
        nu_a, j_a = np.broadcast_arrays(np.asarray(nu), np.asarray(j))
        f = self.family
        v = self.variant
        if v == "H":
            out = np.asarray(f.log_alpha(nu_a, j_a), dtype=float)
        elif v in ("G", "Gc"):
            out = np.asarray(f.log_alpha(nu_a, np.ones_like(j_a)), dtype=float) - np.asarray(
                log_gamma(f, j_a), dtype=float
            ) - self._log_c
        else:
            out = np.asarray(f.log_alpha(np.ones_like(nu_a), j_a), dtype=float) - self._log_c
            out = np.where(nu_a > 1, INF, out)
        return out


def log_weight(weights: FactorWeights, index: MultiIndex) -> float:
    """``ln prod_j w(nu_j, j)``, summed in increasing coordinate order."""
    return math.fsum(weights(v, j) for j, v in index)


# ---------------------------------------------------------------------------
# lazy enumeration
# ---------------------------------------------------------------------------


class SingularValueStream:
    """Iterator over ``(xi, multi_index)`` in non-increasing order of ``xi``.

    Parameters
    ----------
    family : WeightFamily
    variant : {"H", "G", "F", "Gc", "Fc"}
    c : float
        Scale of the anchored variants.
    max_coordinate : int
        Coordinate horizon of an infinite tensor product.  Emissions whose
        correctness would depend on coordinates beyond it raise
        :class:`CoordinateHorizonExceeded`.
    dimension : int, optional
        Treat the product as finite-dimensional with this many factors; no
        certification is needed and the stream ends once exhausted.
    coordinate : int, optional
        Enumerate the single factor at this coordinate instead of the product.
    """

    def __init__(
        self,
        family: WeightFamily,
        variant: str = "H",
        c: float = 1.0,
        max_coordinate: int = 10**6,
        dimension: int | None = None,
        tie_tol: float = TIE_TOL,
        coordinate: int | None = None,
    ):
        self.weights = FactorWeights(family, variant, c)
        self.coordinate = coordinate
        if coordinate is not None:
            if coordinate < 1:
                raise ValueError("coordinate must be at least 1")
            dimension = coordinate
        self.variant = self.weights.variant
        self.dimension = dimension
        self.horizon = int(dimension if dimension is not None else max_coordinate)
        if self.horizon < 1:
            raise ValueError("the coordinate horizon must be at least 1")
        self.tie_tol = tie_tol
        self.emitted = 0
        self.last_log_weight = 0.0
        self._heap: list[tuple[float, tuple, MultiIndex]] = [(0.0, tie_key(()), ())]
        self._ready: list[tuple[float, MultiIndex]] = []
        self._beyond = INF if dimension is not None else self.weights(1, self.horizon + 1)

    # tree structure ---------------------------------------------------

    def _children(self, index: MultiIndex, lw: float) -> Iterator[tuple[float, MultiIndex]]:
        w = self.weights
        if not index:
            j0 = 1 if self.coordinate is None else self.coordinate
            w11 = w(1, j0)
            self._check_factor(w11, j0)
            yield lw + w11, ((j0, 1),)
            return
        top_j, top_v = index[-1]
        head = index[:-1]
        if w.max_nu is None or top_v < w.max_nu:
            step = w(top_v + 1, top_j) - w(top_v, top_j)
            if step < -self._tol(lw):
                raise NonMonotoneWeights(
                    f"factor weight decreases in nu at coordinate {top_j}: nu={top_v} -> {top_v + 1}"
                )
            yield lw + step, head + ((top_j, top_v + 1),)
        if top_j < self.horizon and self.coordinate is None:
            nxt = w(1, top_j + 1)
            self._check_factor(nxt, top_j + 1)
            if top_v == 1:
                step = nxt - w(1, top_j)
                if step < -self._tol(lw):
                    raise NonMonotoneWeights(
                        f"factor weight w(1, j) decreases from j={top_j} to j={top_j + 1}"
                    )
                yield lw + step, head + ((top_j + 1, 1),)
            yield lw + nxt, index + ((top_j + 1, 1),)

    def _check_factor(self, lw: float, j: int) -> None:
        if not lw > 0:
            raise NonMonotoneWeights(
                f"factor weight w(1, {j}) = exp({lw:g}) must exceed 1 for the enumeration to terminate"
            )

    def _tol(self, lw: float) -> float:
        return self.tie_tol * max(1.0, abs(lw))

    # emission ---------------------------------------------------------

    def _fill(self) -> None:
        if not self._heap:
            if self.dimension is not None:
                raise StopIteration
            raise CoordinateHorizonExceeded(
                f"all multi-indices within coordinates <= {self.horizon} were emitted"
            )
        W = self._heap[0][0]
        tol = self._tol(W)
        if W + tol >= self._beyond:
            raise CoordinateHorizonExceeded(
                f"emission {self.emitted + 1} (log weight {W:.6g}) is not certified: "
                f"w(1, {self.horizon + 1}) = exp({self._beyond:.6g}) is not above it; "
                "raise max_coordinate"
            )
        group: list[tuple[float, MultiIndex]] = []
        pending: list[tuple[float, MultiIndex]] = []
        while self._heap and self._heap[0][0] <= W + tol:
            lw, _, idx = heapq.heappop(self._heap)
            pending.append((lw, idx))
        # close the tie group under zero-gap children before ordering it
        while pending:
            lw, idx = pending.pop()
            group.append((lw, idx))
            for clw, cidx in self._children(idx, lw):
                if clw <= W + tol:
                    pending.append((clw, cidx))
                else:
                    heapq.heappush(self._heap, (clw, tie_key(cidx), cidx))
        group.sort(key=lambda e: tie_key(e[1]), reverse=True)
        self._ready = group

    def __iter__(self) -> "SingularValueStream":
        return self

    def __next__(self) -> tuple[float, MultiIndex]:
        if not self._ready:
            self._fill()
        lw, idx = self._ready.pop()
        self.emitted += 1
        self.last_log_weight = lw
        return math.exp(-0.5 * lw), idx

    def next_singular_value(self) -> tuple[float, MultiIndex]:
        return next(self)

    def take(self, k: int) -> tuple[np.ndarray, list[MultiIndex]]:
        """The next ``k`` emissions as ``(log_weights, indices)``."""
        lws = np.empty(k)
        idxs: list[MultiIndex] = []
        for i in range(k):
            _, idx = next(self)
            lws[i] = self.last_log_weight
            idxs.append(idx)
        return lws, idxs

    def take_certified(self, k: int) -> tuple[np.ndarray, list[MultiIndex]]:
        """Up to ``k`` emissions, stopping quietly at the coordinate horizon."""
        lws: list[float] = []
        idxs: list[MultiIndex] = []
        try:
            for _ in range(k):
                _, idx = next(self)
                lws.append(self.last_log_weight)
                idxs.append(idx)
        except (CoordinateHorizonExceeded, StopIteration):
            pass
        return np.asarray(lws), idxs


def _resolve(space_or_family, variant: str | None, c: float | None):
    if isinstance(space_or_family, WeightFamily):
        return space_or_family, base_variant(variant or "H"), 1.0 if c is None else c, {}
    space = space_or_family
    extra = {}
    j_max = getattr(space, "j_max", None)
    if j_max:
        extra["max_coordinate"] = j_max
    return space.family, base_variant(variant or space.variant), getattr(space, "c", 1.0) if c is None else c, extra


def singular_values(
    space_or_family, k: int, variant: str | None = None, c: float | None = None, **stream_kw
) -> np.ndarray:
    """The ``k`` largest singular values ``xi_1 >= ... >= xi_k``."""
    family, var, cc, extra = _resolve(space_or_family, variant, c)
    extra.update(stream_kw)
    stream = SingularValueStream(family, var, cc, **extra)
    lws = np.empty(k)
    for i in range(k):
        next(stream)
        lws[i] = stream.last_log_weight
    return np.exp(-0.5 * lws)


def min_error_all(space_or_family, n: int, variant: str | None = None, c: float | None = None, **stream_kw) -> float:
    """``err_n`` for L2-approximation with arbitrary linear information, ``= xi_{n+1}``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return float(singular_values(space_or_family, n + 1, variant, c, **stream_kw)[-1])


def min_errors_all(space_or_family, n_max: int, variant: str | None = None, c: float | None = None, **stream_kw) -> np.ndarray:
    """``err_0, ..., err_{n_max}`` in one pass."""
    return singular_values(space_or_family, n_max + 1, variant, c, **stream_kw)


# ---------------------------------------------------------------------------
# predicted decays
# ---------------------------------------------------------------------------


def _params(family_or_params) -> DecayParams:
    if isinstance(family_or_params, DecayParams):
        return family_or_params
    return decay_params(family_or_params)


def predicted_decay_all(family_or_params, variant: str = "H") -> float:
    """Decay of ``err_n`` with arbitrary linear information for the H, G or F product."""
    p = _params(family_or_params)
    v = base_variant(variant)
    if v == "H":
        return 0.5 * min(p.decay_alpha_nu1, p.decay_alpha_1j)
    if v == "F":
        return 0.5 * p.decay_alpha_1j
    if v == "G":
        return 0.5 * min(p.decay_alpha_nu1, p.decay_gamma)
    raise ValueError("predicted decays are available for the H, G and F variants")


@dataclass(frozen=True)
class Interval:
    """Closed interval of extended reals."""

    lower: float
    upper: float

    @property
    def is_point(self) -> bool:
        return self.lower == self.upper

    def __contains__(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def _half_minus_one(d: float) -> float:
    return INF if d == INF else 0.5 * (d - 1.0)


def predicted_decay_std(
    family_or_params, univariate_dec: float, variant: str = "H", problem: str = "App"
) -> Interval:
    """Decay interval of ``err_n`` with standard information under unrestricted subspace sampling.

    ``univariate_dec`` is the decay for the first factor H_1 alone.  The
    bounds hold for ``problem`` in {"App", "Int"} alike and assume the G
    product is a reproducing kernel Hilbert space, which forces
    ``decay(gamma) >= 1``.
    """
    if problem not in ("App", "Int"):
        raise ValueError("problem must be 'App' or 'Int'")
    p = _params(family_or_params)
    v = base_variant(variant)
    if v == "F":
        if p.decay_alpha_1j < 1:
            raise ValueError("the F product needs decay(1/alpha[1,j]) >= 1")
        d = _half_minus_one(p.decay_alpha_1j)
        return Interval(d, d)
    if p.decay_gamma < 1:
        raise ValueError("the bounds need decay(gamma) >= 1 (G must be a reproducing kernel Hilbert space)")
    lower = min(univariate_dec, _half_minus_one(p.decay_gamma))
    if v == "G":
        return Interval(lower, lower)
    if v == "H":
        upper = min(univariate_dec, _half_minus_one(p.decay_alpha_1j))
        return Interval(lower, upper)
    raise ValueError("predicted decays are available for the H, G and F variants")


# ---------------------------------------------------------------------------
# cost model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostModel:
    """Non-decreasing cost ``$(n) >= 1`` of evaluating at a point with n active variables.

    ``linear``: ``max(1, n)``; ``fixed``: the constant ``value``;
    ``exponential``: ``max(1, scale * exp(zeta * n))``.
    """

    kind: str = "linear"
    value: float = 1.0
    zeta: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "fixed", "exponential"):
            raise ValueError(f"unknown cost model {self.kind!r}")
        if self.kind == "fixed" and self.value < 1:
            raise ValueError("fixed cost must be at least 1")
        if self.kind == "exponential" and not self.zeta > 0:
            raise ValueError("exponential cost needs zeta > 0")

    def __call__(self, n: float) -> float:
        if n == INF:
            return INF
        if n < 0:
            raise ValueError("number of active variables is non-negative")
        if self.kind == "linear":
            return float(max(1, n))
        if self.kind == "fixed":
            return float(self.value)
        return max(1.0, self.scale * math.exp(self.zeta * n))

    @classmethod
    def from_dict(cls, spec: Mapping) -> "CostModel":
        return cls(**dict(spec))


def active_variables(point, anchor: float = 0.0) -> int:
    """Number of coordinates of ``point`` that differ from the anchor.

    ``point`` is a mapping ``j -> y_j`` holding the finitely many deviating
    coordinates (entries equal to the anchor are ignored), or a finite
    sequence ``(y_1, y_2, ...)`` continued by the anchor.
    """
    values: Iterable = point.values() if isinstance(point, Mapping) else point
    return sum(1 for y in values if y != anchor)


def evaluate_cost(points: Sequence, model: CostModel, anchor: float = 0.0) -> float:
    """Total cost ``sum_i $(Act(y_i))`` of evaluating at the given points."""
    return math.fsum(model(active_variables(p, anchor)) for p in points)
