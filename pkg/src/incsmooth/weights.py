"""Fourier weight families alpha[nu, j] and the quantities derived from them.

Two parametric kinds are supported,

* polynomial:      alpha[nu, j] = a_nu ** r_j
* subexponential:  alpha[nu, j] = a ** (r_j * nu ** b_j)

plus explicit finite tables with a declared completion rule.  With the
convention alpha[0, j] = alpha[nu, 0] = 1.  Everything is computed in log
space; ``alpha`` itself may overflow to ``inf`` for sub-exponential weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from incsmooth.errors import IndexOutOfTable, RhoUnavailable

INF = math.inf

POLYNOMIAL = "polynomial"
SUBEXPONENTIAL = "subexponential"
TABLE = "table"
KINDS = (POLYNOMIAL, SUBEXPONENTIAL, TABLE)

TABLE_EXTENSIONS = ("none", "constant", "geometric")

_EXPR_NAMESPACE = {
    "log": np.log,
    "ln": np.log,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "floor": np.floor,
    "ceil": np.ceil,
    "abs": np.abs,
    "minimum": np.minimum,
    "maximum": np.maximum,
    "pi": math.pi,
    "e": math.e,
}


# ---------------------------------------------------------------------------
# sequence rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    """A rule ``i -> x_i`` for positive integers ``i``, evaluated elementwise.

    ``kind`` is one of ``constant``, ``linear``, ``log``, ``power``,
    ``values``, ``A1``, ``A2``, ``expr`` or ``callable``.  Parametric kinds
    know their liminf of ``x_i / ln(i)`` in closed form (see :meth:`rho`).
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    # constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "Rule":
        return cls("constant", {"value": float(value)})

    @classmethod
    def linear(cls, offset: float, slope: float) -> "Rule":
        """``offset + slope * i``."""
        return cls("linear", {"offset": float(offset), "slope": float(slope)})

    @classmethod
    def log(cls, offset: float, slope: float, shift: float = 0.0) -> "Rule":
        """``offset + slope * ln(i + shift)``."""
        return cls("log", {"offset": float(offset), "slope": float(slope), "shift": float(shift)})

    @classmethod
    def power(cls, offset: float, scale: float, exponent: float) -> "Rule":
        """``offset + scale * i ** exponent``."""
        return cls(
            "power", {"offset": float(offset), "scale": float(scale), "exponent": float(exponent)}
        )

    @classmethod
    def values(cls, values: Sequence[float]) -> "Rule":
        """Explicit values for ``i = 1..len(values)``, constant afterwards."""
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("values rule needs at least one value")
        return cls("values", {"values": vals})

    @classmethod
    def builtin_a1(cls) -> "Rule":
        """``a_nu = 2 pi floor((nu + 1) / 2)``."""
        return cls("A1")

    @classmethod
    def builtin_a2(cls) -> "Rule":
        """``a_nu = 1 + floor((nu + 1) / 2)``."""
        return cls("A2")

    @classmethod
    def expr(cls, expression: str) -> "Rule":
        """A user expression in the variable ``i`` (aliases ``j``, ``nu``)."""
        return cls("expr", {"expr": str(expression)})

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], name: str = "callable") -> "Rule":
        return cls("callable", {"name": name}, fn)

    @classmethod
    def from_dict(cls, spec: Mapping[str, Any] | str | float) -> "Rule":
        """Build a rule from its config representation."""
        if isinstance(spec, (int, float)):
            return cls.constant(spec)
        if isinstance(spec, str):
            if spec.upper() in ("A1", "BUILTINA1"):
                return cls.builtin_a1()
            if spec.upper() in ("A2", "BUILTINA2"):
                return cls.builtin_a2()
            return cls.expr(spec)
        spec = dict(spec)
        kind = spec.pop("type", spec.pop("kind", None))
        if kind is None:
            raise ValueError(f"rule needs a 'type': {spec!r}")
        kind = str(kind)
        if kind in ("A1", "A2"):
            return cls(kind)
        if kind == "constant":
            return cls.constant(spec["value"])
        if kind == "linear":
            return cls.linear(spec.get("offset", 0.0), spec["slope"])
        if kind == "log":
            return cls.log(spec.get("offset", 0.0), spec["slope"], spec.get("shift", 0.0))
        if kind == "power":
            return cls.power(spec.get("offset", 0.0), spec.get("scale", 1.0), spec["exponent"])
        if kind == "values":
            return cls.values(spec["values"])
        if kind == "expr":
            return cls.expr(spec["expr"])
        raise ValueError(f"unknown rule type {kind!r}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"type": self.kind}
        for k, v in self.params.items():
            out[k] = list(v) if isinstance(v, tuple) else v
        return out

    # evaluation -------------------------------------------------------

    def __call__(self, i):
        arr = np.asarray(i, dtype=float)
        p = self.params
        k = self.kind
        if k == "constant":
            out = np.full(arr.shape, p["value"])
        elif k == "linear":
            out = p["offset"] + p["slope"] * arr
        elif k == "log":
            out = p["offset"] + p["slope"] * np.log(arr + p["shift"])
        elif k == "power":
            out = p["offset"] + p["scale"] * arr ** p["exponent"]
        elif k == "values":
            vals = np.asarray(p["values"])
            idx = np.clip(arr.astype(np.int64) - 1, 0, len(vals) - 1)
            out = vals[idx]
        elif k == "A1":
            out = 2.0 * math.pi * np.floor((arr + 1.0) / 2.0)
        elif k == "A2":
            out = 1.0 + np.floor((arr + 1.0) / 2.0)
        elif k == "expr":
            ns = dict(_EXPR_NAMESPACE, i=arr, j=arr, nu=arr, n=arr)
            out = eval(p["expr"], {"__builtins__": {}}, ns)  # noqa: S307
            out = np.broadcast_to(np.asarray(out, dtype=float), arr.shape)
        elif k == "callable":
            assert self.fn is not None
            out = np.asarray(self.fn(arr), dtype=float)
            if out.shape != arr.shape:
                out = np.vectorize(lambda t: float(self.fn(t)))(arr)
        else:
            raise ValueError(f"unknown rule kind {k!r}")
        out = np.asarray(out, dtype=float)
        return float(out) if out.ndim == 0 else out

    def rho(self) -> float | None:
        """Closed-form ``liminf x_i / ln(i)``, or ``None`` when unknown."""
        p = self.params
        if self.kind in ("constant", "values"):
            return 0.0
        if self.kind == "linear":
            return INF if p["slope"] > 0 else 0.0
        if self.kind == "log":
            return max(p["slope"], 0.0)
        if self.kind == "power":
            return INF if p["scale"] > 0 and p["exponent"] > 0 else 0.0
        return None

    def describe(self) -> str:
        p = self.params
        if self.kind == "constant":
            return f"{p['value']:g}"
        if self.kind == "linear":
            return f"{p['offset']:g} + {p['slope']:g}*i"
        if self.kind == "log":
            s = f"ln(i + {p['shift']:g})" if p["shift"] else "ln(i)"
            return f"{p['offset']:g} + {p['slope']:g}*{s}"
        if self.kind == "power":
            return f"{p['offset']:g} + {p['scale']:g}*i^{p['exponent']:g}"
        if self.kind == "A1":
            return "2*pi*floor((i+1)/2)"
        if self.kind == "A2":
            return "1 + floor((i+1)/2)"
        if self.kind == "expr":
            return p["expr"]
        return self.kind


def lower_slope(rule: Rule, probe: int = 4096) -> tuple[float, bool]:
    """A constant kappa with ``a_nu >= kappa * nu`` and whether it is exact.

    Exact for the built-in rules and for non-negative linear rules; otherwise
    the minimum of ``a_nu / nu`` over the probe range (heuristic).
    """
    if rule.kind == "A1":
        return math.pi, True
    if rule.kind == "A2":
        return 0.5, True
    if rule.kind == "linear" and rule.params["offset"] >= 0:
        return rule.params["slope"], True
    nu = np.arange(1, probe + 1, dtype=float)
    return float(np.min(rule(nu) / nu)), False


# ---------------------------------------------------------------------------
# weight families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightFamily:
    """Fourier weights alpha[nu, j] for nu, j >= 0.

    Use the constructors :meth:`polynomial`, :meth:`subexponential` and
    :meth:`from_table`.  ``rho`` may be supplied for rules without a closed
    form liminf.
    """

    kind: str
    a_rule: Rule | None = None
    r_rule: Rule | None = None
    b_rule: Rule | None = None
    a_base: float | None = None
    table: tuple[tuple[float, ...], ...] | None = None
    extension: str = "none"
    rho: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == POLYNOMIAL and (self.a_rule is None or self.r_rule is None):
            raise ValueError("polynomial family needs a_rule and r_rule")
        if self.kind == SUBEXPONENTIAL:
            if self.a_base is None or self.r_rule is None or self.b_rule is None:
                raise ValueError("subexponential family needs a_base, r_rule and b_rule")
            if not self.a_base > 1:
                raise ValueError("subexponential base a must exceed 1")
        if self.kind == TABLE:
            if not self.table or not all(self.table):
                raise ValueError("table family needs a non-empty table")
            width = len(self.table[0])
            if any(len(row) != width for row in self.table):
                raise ValueError("table rows must have equal length")
            if any(not v > 0 for row in self.table for v in row):
                raise ValueError("table weights must be positive")
            if self.extension not in TABLE_EXTENSIONS:
                raise ValueError(f"extension must be one of {TABLE_EXTENSIONS}")

    # constructors -----------------------------------------------------

    @classmethod
    def polynomial(cls, a: Rule | str = "A2", r: Rule | float = 2.0, rho: float | None = None):
        a_rule = a if isinstance(a, Rule) else Rule.from_dict(a)
        r_rule = r if isinstance(r, Rule) else Rule.from_dict(r)
        return cls(POLYNOMIAL, a_rule=a_rule, r_rule=r_rule, rho=rho)

    @classmethod
    def subexponential(
        cls, a: float, r: Rule | float, b: Rule | float = 1.0, rho: float | None = None
    ):
        r_rule = r if isinstance(r, Rule) else Rule.from_dict(r)
        b_rule = b if isinstance(b, Rule) else Rule.from_dict(b)
        return cls(SUBEXPONENTIAL, r_rule=r_rule, b_rule=b_rule, a_base=float(a), rho=rho)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[float]], extension: str = "none"):
        """``table[nu - 1][j - 1]`` holds alpha[nu, j] for nu, j >= 1."""
        tab = tuple(tuple(float(v) for v in row) for row in table)
        return cls(TABLE, table=tab, extension=extension)

    @classmethod
    def from_dict(cls, spec: Mapping[str, Any]) -> "WeightFamily":
        kind = spec.get("kind", POLYNOMIAL)
        rho = spec.get("rho")
        if kind == POLYNOMIAL:
            return cls.polynomial(
                Rule.from_dict(spec.get("a_rule", "A2")), Rule.from_dict(spec["r_rule"]), rho
            )
        if kind == SUBEXPONENTIAL:
            return cls.subexponential(
                spec["a_base"], Rule.from_dict(spec["r_rule"]), Rule.from_dict(spec.get("b_rule", 1.0)), rho
            )
        if kind == TABLE:
            return cls.from_table(spec["table"], spec.get("extension", "none"))
        raise ValueError(f"unknown weight family kind {kind!r}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.a_rule is not None:
            out["a_rule"] = self.a_rule.to_dict()
        if self.r_rule is not None:
            out["r_rule"] = self.r_rule.to_dict()
        if self.b_rule is not None:
            out["b_rule"] = self.b_rule.to_dict()
        if self.a_base is not None:
            out["a_base"] = self.a_base
        if self.table is not None:
            out["table"] = [list(row) for row in self.table]
            out["extension"] = self.extension
        if self.rho is not None:
            out["rho"] = self.rho
        return out

    # parameters -------------------------------------------------------

    def r(self, j):
        assert self.r_rule is not None
        return self.r_rule(j)

    def a(self, nu):
        assert self.a_rule is not None
        return self.a_rule(nu)

    def b(self, j):
        assert self.b_rule is not None
        return self.b_rule(j)

    @property
    def table_shape(self) -> tuple[int, int]:
        assert self.table is not None
        return len(self.table), len(self.table[0])

    # weights ----------------------------------------------------------

    def log_alpha(self, nu, j):
        """``ln alpha[nu, j]`` with numpy broadcasting; exactly 0 for nu == 0 or j == 0."""
        nu_arr = np.asarray(nu)
        j_arr = np.asarray(j)
        nu_f, j_f = np.broadcast_arrays(nu_arr.astype(float), j_arr.astype(float))
        active = (nu_f > 0) & (j_f > 0)
        out = np.zeros(nu_f.shape)
        if np.any(active):
            nv = nu_f[active]
            jv = j_f[active]
            if self.kind == POLYNOMIAL:
                out[active] = np.asarray(self.r(jv)) * np.log(np.asarray(self.a(nv)))
            elif self.kind == SUBEXPONENTIAL:
                la = math.log(self.a_base)
                out[active] = np.asarray(self.r(jv)) * nv ** np.asarray(self.b(jv)) * la
            else:
                out[active] = self._table_log(nv.astype(np.int64), jv.astype(np.int64))
        return float(out) if out.ndim == 0 else out

    def _table_log(self, nu: np.ndarray, j: np.ndarray) -> np.ndarray:
        logt = np.log(np.asarray(self.table, dtype=float))
        V, J = logt.shape
        outside = (nu > V) | (j > J)
        if np.any(outside) and self.extension == "none":
            bad = np.argmax(outside)
            raise IndexOutOfTable(
                f"alpha[{int(nu[bad])}, {int(j[bad])}] lies outside the {V}x{J} table "
                "and the table declares no extension rule"
            )
        if self.extension != "geometric":
            return logt[np.minimum(nu, V) - 1, np.minimum(j, J) - 1]

        def row(v):
            # row v (0-based), continued log-linearly in j past the last column
            base = logt[v, np.minimum(j, J) - 1]
            if J == 1:
                return base
            return base + np.maximum(j - J, 0) * (logt[v, J - 1] - logt[v, J - 2])

        inside = row(np.minimum(nu, V) - 1)
        if V == 1:
            return inside
        step = row(np.full_like(nu, V - 1)) - row(np.full_like(nu, V - 2))
        return inside + np.maximum(nu - V, 0) * step

    def alpha(self, nu, j):
        with np.errstate(over="ignore"):
            out = np.exp(self.log_alpha(nu, j))
        return float(out) if np.ndim(out) == 0 else out


def alpha(family: WeightFamily, nu: int, j: int) -> float:
    """alpha[nu, j]; 1 when ``nu == 0`` or ``j == 0``."""
    if nu < 0 or j < 0:
        raise ValueError("nu and j must be non-negative")
    if nu == 0 or j == 0:
        return 1.0
    return family.alpha(nu, j)


# ---------------------------------------------------------------------------
# gamma_j and embedding norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    value: float
    argmax: int
    conclusive: bool


def log_gamma(family: WeightFamily, j, scan_limit: int = 4096):
    """``ln gamma_j``; closed form for the parametric kinds."""
    j_arr = np.asarray(j, dtype=float)
    if family.kind == POLYNOMIAL:
        r1 = float(family.r(1))
        a1 = float(family.a(1))
        out = (r1 - np.asarray(family.r(j_arr))) * math.log(a1)
    elif family.kind == SUBEXPONENTIAL:
        r1 = float(family.r(1))
        out = (r1 - np.asarray(family.r(j_arr))) * math.log(family.a_base)
    else:
        js = np.atleast_1d(j_arr).astype(int)
        out = np.array([math.log(scan_gamma(family, int(jj), scan_limit).value) for jj in js.ravel()])
        out = out.reshape(np.shape(j_arr))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def gamma(family: WeightFamily, j: int, scan_limit: int = 4096) -> float:
    """``gamma_j = sup_nu alpha[nu, 1] / alpha[nu, j]``.

    Closed form ``a_1 ** (r_1 - r_j)`` (resp. ``a ** (r_1 - r_j)``) for the
    parametric kinds, scanned maximum over ``nu <= scan_limit`` for tables.
    """
    if j < 1:
        raise ValueError("gamma is defined for j >= 1")
    if j == 1:
        return 1.0
    return math.exp(log_gamma(family, j, scan_limit))


def scan_gamma(family: WeightFamily, j: int, scan_limit: int) -> ScanResult:
    """Maximum of ``alpha[nu, 1] / alpha[nu, j]`` over ``1 <= nu <= scan_limit``.

    ``conclusive`` says whether the scanned maximum is the true supremum:
    always for tables whose completion cannot increase the ratio, never
    claimed otherwise.
    """
    if family.kind == TABLE:
        V = family.table_shape[0]
        if family.extension == "none":
            scan_limit = min(scan_limit, V)
    nu = np.arange(1, scan_limit + 1)
    lr = family.log_alpha(nu, 1) - family.log_alpha(nu, j)
    k = int(np.argmax(lr))
    conclusive = False
    if family.kind in (POLYNOMIAL, SUBEXPONENTIAL):
        conclusive = True  # maximum sits at nu = 1 for non-decreasing a_nu, r_j, b_j
    elif family.kind == TABLE:
        V = family.table_shape[0]
        if scan_limit >= V:
            if family.extension in ("none", "constant"):
                conclusive = True
            elif V > 1:
                tail = family.log_alpha([V + 1], 1) - family.log_alpha([V + 1], j)
                conclusive = bool(tail[0] <= lr[V - 1] + 1e-12)
            else:
                conclusive = True
    return ScanResult(math.exp(lr[k]), int(nu[k]), conclusive)


def embedding_norm(family: WeightFamily, i: int, j: int, scan_limit: int = 4096) -> float:
    """Norm of the embedding H_j -> H_i, ``sup_nu sqrt(alpha[nu, i] / alpha[nu, j])``.

    Returns ``inf`` when the ratio is unbounded (detected in closed form for
    the parametric kinds, by a growing scan otherwise).
    """
    if i < 0 or j < 0:
        raise ValueError("space indices are non-negative")
    if i == j or i == 0:
        return 1.0
    if family.kind == POLYNOMIAL and j > 0:
        ri, rj = float(family.r(i)), float(family.r(j))
        return 1.0 if ri <= rj else INF
    if family.kind == POLYNOMIAL and j == 0:
        return INF
    if family.kind == SUBEXPONENTIAL:
        if j == 0:
            return INF
        bi, bj = float(family.b(i)), float(family.b(j))
        ri, rj = float(family.r(i)), float(family.r(j))
        if bi > bj or (bi == bj and ri > rj):
            return INF
        if bi == bj:
            return 1.0
    nu = np.arange(1, scan_limit + 1)
    lr = family.log_alpha(nu, i) - family.log_alpha(nu, j)
    best = max(0.0, float(np.max(lr)))
    if family.kind == TABLE and family.extension == "geometric":
        far = family.log_alpha([scan_limit * 2], i) - family.log_alpha([scan_limit * 2], j)
        if far[0] > best + 1e-9:
            return INF
    return math.exp(0.5 * best)


def g_embedding_norm(family: WeightFamily, j: int, scan_limit: int = 4096) -> float:
    """Norm of H_j -> G_j, i.e. ``sup_nu sqrt((alpha[nu, 1] / gamma_j) / alpha[nu, j])``.

    Always 1 up to rounding: attained at nu = 0 and bounded by definition of gamma_j.
    """
    nu = np.arange(1, scan_limit + 1)
    lr = family.log_alpha(nu, 1) - log_gamma(family, j, scan_limit) - family.log_alpha(nu, j)
    return math.exp(0.5 * max(0.0, float(np.max(lr))))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    """Outcome of checking a family against the standing assumptions on a probe grid."""

    c1_ok: bool
    c1_violations: list[tuple[int, int]]
    c2_ok: bool
    alpha11: float
    positivity_ok: bool
    r_monotone: bool | None
    b_monotone: bool | None
    a_monotone: bool | None
    a1_gt_1: bool | None
    a_ratio_bounds: tuple[float, float] | None
    a_asymptotic_ok: bool | None
    g5: bool | None
    rho: float | None
    probe: tuple[int, int]
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        flags = [self.c1_ok, self.c2_ok, self.positivity_ok]
        flags += [f for f in (self.r_monotone, self.b_monotone, self.a_monotone, self.a1_gt_1) if f is not None]
        return all(flags)

    def problems(self) -> list[str]:
        out = []
        if not self.positivity_ok:
            out.append("weight parameters must be positive")
        if self.r_monotone is False:
            out.append("r_j must be non-decreasing (0 < r_1 <= r_j)")
        if self.b_monotone is False:
            out.append("b_j must be non-decreasing (0 < b_1 <= b_j)")
        if self.a_monotone is False:
            out.append("a_nu must be non-decreasing")
        if self.a1_gt_1 is False:
            out.append("a_1 must exceed 1")
        if not self.c1_ok:
            out.append(f"condition C1 fails at {self.c1_violations[:5]}")
        if not self.c2_ok:
            out.append(f"condition C2 fails: alpha[1,1] = {self.alpha11:g} must exceed 1")
        return out


def _monotone(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) >= -1e-12 * np.maximum(1.0, np.abs(values[1:]))))


def validate(family: WeightFamily, probe_nu: int = 64, probe_j: int = 64) -> ValidationReport:
    """Check C1, C2, parameter monotonicity and (where possible) the g5 condition.

    Violations are reported, never raised.
    """
    notes: list[str] = []
    if family.kind == TABLE and family.extension == "none":
        V, J = family.table_shape
        if probe_nu > V or probe_j > J:
            notes.append(f"probe grid clipped to the {V}x{J} table")
        probe_nu, probe_j = min(probe_nu, V), min(probe_j, J)
    nu = np.arange(1, probe_nu + 1)[:, None]
    jj = np.arange(1, probe_j + 1)[None, :]
    la = family.log_alpha(nu, jj)
    la = np.asarray(la).reshape(probe_nu, probe_j)
    lower = np.maximum(la[:, :1], la[:1, :])
    tol = 1e-12 * np.maximum(1.0, np.abs(lower))
    bad = np.argwhere(la < lower - tol)
    violations = [(int(v + 1), int(w + 1)) for v, w in bad[:50]]
    alpha11 = math.exp(la[0, 0]) if la[0, 0] < 700 else INF
    c2 = bool(la[0, 0] > 0)

    positivity = True
    r_mono = b_mono = a_mono = a1_ok = a_asym = None
    ratio_bounds = None
    js = np.arange(1, probe_j + 1, dtype=float)
    if family.kind in (POLYNOMIAL, SUBEXPONENTIAL):
        rv = np.asarray(family.r(js))
        positivity &= bool(np.all(rv > 0))
        r_mono = _monotone(rv)
    if family.kind == SUBEXPONENTIAL:
        bv = np.asarray(family.b(js))
        positivity &= bool(np.all(bv > 0))
        b_mono = _monotone(bv)
    if family.kind == POLYNOMIAL:
        nus = np.arange(1, probe_nu + 1, dtype=float)
        av = np.asarray(family.a(nus))
        positivity &= bool(np.all(av > 0))
        a_mono = _monotone(av)
        a1_ok = bool(av[0] > 1)
        ratios = av / nus
        ratio_bounds = (float(ratios.min()), float(ratios.max()))
        # heuristic check of a_nu ~ nu: ratio a_nu / nu stays within a fixed band
        a_asym = bool(ratio_bounds[0] > 0 and ratio_bounds[1] / ratio_bounds[0] <= 100.0)
        if not a_asym:
            notes.append("a_nu / nu varies by more than a factor 100 over the probe range")
    if family.kind == TABLE:
        notes.append("C1 is verified on the probe grid only; the table completion is not checked beyond it")

    rho_val: float | None
    try:
        rho_val = decay_params(family).rho
    except RhoUnavailable:
        rho_val = None
    g5: bool | None = None
    if rho_val is not None:
        if family.kind == POLYNOMIAL:
            g5 = rho_val > 0
        elif family.kind == SUBEXPONENTIAL:
            g5 = True if rho_val > 0 else None
            if g5 is None:
                notes.append("g5 is undecided for subexponential weights with rho = 0")
    return ValidationReport(
        c1_ok=not violations,
        c1_violations=violations,
        c2_ok=c2,
        alpha11=alpha11,
        positivity_ok=positivity,
        r_monotone=r_mono,
        b_monotone=b_mono,
        a_monotone=a_mono,
        a1_gt_1=a1_ok,
        a_ratio_bounds=ratio_bounds,
        a_asymptotic_ok=a_asym,
        g5=g5,
        rho=rho_val,
        probe=(probe_nu, probe_j),
        notes=notes,
    )


# ---------------------------------------------------------------------------
# decay exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayParams:
    """Decay exponents of the three weight sequences that govern the minimal errors."""

    rho: float
    decay_alpha_nu1: float
    decay_alpha_1j: float
    decay_gamma: float
    rho_is_estimate: bool = False


def estimate_rho(rule: Rule, j_max: int = 2**22) -> float:
    """Estimate ``liminf r_j / ln j`` by the running minimum over ``[J/2, J]`` for doubling J.

    Returns the running minimum over the last window; callers must treat the
    value as an estimate.
    """
    J = 16
    est = INF
    while J <= j_max:
        js = np.unique(np.geomspace(J // 2, J, 256).astype(np.int64))
        vals = np.asarray(rule(js.astype(float))) / np.log(js)
        if not np.all(np.isfinite(vals)):
            raise RhoUnavailable(f"rule {rule.describe()} is not finite on [{J // 2}, {J}]")
        est = float(np.min(vals))
        J *= 2
    return est


def rho_of(family: WeightFamily, allow_estimate: bool = True) -> tuple[float, bool]:
    """``(rho, is_estimate)`` for a parametric family."""
    if family.rho is not None:
        return float(family.rho), False
    if family.kind == TABLE:
        raise RhoUnavailable("tabulated families carry no r_j sequence; supply rho explicitly")
    assert family.r_rule is not None
    closed = family.r_rule.rho()
    if closed is not None:
        return closed, False
    if not allow_estimate:
        raise RhoUnavailable(f"no closed form for liminf r_j/ln j of {family.r_rule.describe()}")
    return estimate_rho(family.r_rule), True


def decay_params(family: WeightFamily, allow_estimate: bool = True) -> DecayParams:
    """Closed-form decays of (1/alpha[nu,1])_nu, (1/alpha[1,j])_j and (gamma_j)_j."""
    if family.kind == TABLE:
        raise RhoUnavailable("decay parameters need a parametric family (or explicit DecayParams)")
    rho, est = rho_of(family, allow_estimate)
    if family.kind == POLYNOMIAL:
        d_nu = float(family.r(1))
        log_base = math.log(float(family.a(1)))
    else:
        d_nu = INF
        log_base = math.log(family.a_base)
    d_j = rho * log_base if rho > 0 else 0.0
    return DecayParams(rho=rho, decay_alpha_nu1=d_nu, decay_alpha_1j=d_j, decay_gamma=d_j, rho_is_estimate=est)
