"""Command-line front end.

    incsmooth <command> --config cfg.json [--config more.json ...]
              [--out DIR] [--format csv|json] [--threads N] [--seed U64]

Each config produces one output file ``<command>_<name>.<format>`` written
atomically.  CSV files open with ``#`` metadata lines echoing the config,
the tool version and the tie-break rule of the spectrum enumeration.

Exit codes: 0 success, 1 invalid config or precondition, 2 certification
failure (coordinate horizon exceeded, bound violated).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import numpy as np

from incsmooth import __version__
from incsmooth.bases import basis_matrix
from incsmooth.config import COMMANDS, ExperimentConfig
from incsmooth.errors import BoundViolation, ConfigError, CoordinateHorizonExceeded, Divergent, IncSmoothError
from incsmooth.haar_approx import bound_constant, interpolation_errors, sample_unit_ball, worst_case_error
from incsmooth.kernels import CoefVector, ProductCoefVector, SpaceSpec, kernel_eval, norm_chain, verify_l200, verify_lw2
from incsmooth.sequences import decay_fit, log_window, summability_grid
from incsmooth.spectra import (
    TIE_BREAK_RULE,
    CostModel,
    SingularValueStream,
    active_variables,
    base_variant,
    index_to_json,
    predicted_decay_all,
    predicted_decay_std,
)
from incsmooth.weights import decay_params

EXIT_OK, EXIT_INVALID, EXIT_CERT = 0, 1, 2

Table = tuple[list[str], list[list[Any]], dict[str, Any]]


# ---------------------------------------------------------------------------
# commands; each returns (columns, rows, extra metadata)
# ---------------------------------------------------------------------------


def _stream(cfg: ExperimentConfig, dimension: int | None = None) -> SingularValueStream:
    s = cfg.space
    if not s.is_product:
        return SingularValueStream(s.family, s.variant, s.c, coordinate=s.j)
    return SingularValueStream(s.family, base_variant(s.variant), s.c, max_coordinate=s.j_max, dimension=dimension)


def cmd_spectrum(cfg: ExperimentConfig) -> Table:
    stream = _stream(cfg, cfg.param("dimension"))
    rows = []
    for i in range(1, cfg.param("k") + 1):
        try:
            xi, idx = next(stream)
        except StopIteration:
            break
        rows.append([i, xi, stream.last_log_weight, json.dumps(index_to_json(idx))])
    return ["i", "xi", "log_weight", "multi_index"], rows, {}


def cmd_minerr(cfg: ExperimentConfig) -> Table:
    n_max = cfg.param("n_max")
    stream = _stream(cfg)
    lw, _ = stream.take(n_max + 1)
    xi = np.exp(-0.5 * lw)
    try:
        predicted = predicted_decay_all(cfg.space.family, base_variant(cfg.space.variant))
    except (IncSmoothError, ValueError):
        predicted = None
    grid = np.r_[0, log_window(1, n_max, cfg.param("n_points"))]
    fit_min = cfg.param("fit_min")
    rows = []
    for n in grid:
        slope = None
        if n + 1 >= fit_min + 2:
            slope = decay_fit(xi[: n + 1], i_min=fit_min, i_max=int(n + 1)).slope
        rows.append([int(n), xi[n], predicted, cfg.space.variant, slope])
    return ["n", "err_all", "predicted_decay", "variant", "fitted_slope"], rows, {}


def cmd_decay(cfg: ExperimentConfig) -> Table:
    fam = cfg.space.family
    p = decay_params(fam)
    uni = cfg.param("univariate_dec")
    if uni is None:
        uni = 0.5 * p.decay_alpha_nu1
    rows: list[list[Any]] = [
        ["rho", p.rho],
        ["rho_is_estimate", p.rho_is_estimate],
        ["decay_alpha_nu1", p.decay_alpha_nu1],
        ["decay_alpha_1j", p.decay_alpha_1j],
        ["decay_gamma", p.decay_gamma],
        ["univariate_dec", uni],
    ]
    for v in ("H", "G", "F"):
        rows.append([f"predicted_all_{v}", predicted_decay_all(p, v)])
    for v in ("H", "G", "F"):
        try:
            iv = predicted_decay_std(p, uni, v)
            rows += [[f"predicted_std_{v}_lower", iv.lower], [f"predicted_std_{v}_upper", iv.upper]]
        except ValueError as exc:
            rows.append([f"predicted_std_{v}", f"unavailable: {exc}"])
    return ["quantity", "value"], rows, {}


def _random_point(space: SpaceSpec, rng: np.random.Generator):
    lo, hi = space.basis.domain
    if space.is_product:
        return rng.uniform(lo, hi, space.j_max).tolist()
    return float(rng.uniform(lo, hi))


def cmd_kernel_eval(cfg: ExperimentConfig) -> Table:
    space = cfg.space
    pts = cfg.param("points")
    if pts is None:
        rng = np.random.default_rng(cfg.seed)
        pts = [(_random_point(space, rng), _random_point(space, rng)) for _ in range(cfg.param("n_points"))]
    rows = []
    for x, y in pts:
        kv = kernel_eval(space, x, y)
        v = complex(kv.value)
        rows.append([_fmt_point(x), _fmt_point(y), v.real, v.imag, kv.tail_bound])
    return ["x", "y", "re", "im", "tail_bound"], rows, {}


def _fmt_point(x) -> Any:
    return json.dumps([float(t) for t in x]) if isinstance(x, (list, tuple)) else float(x)


def cmd_basis_eval(cfg: ExperimentConfig) -> Table:
    basis = cfg.space.basis
    xs = cfg.param("x")
    if xs is None:
        xs = np.linspace(*basis.domain, cfg.param("n_x")).tolist()
    nu_max = cfg.param("nu_max")
    E = basis_matrix(basis, nu_max, xs)
    rows = []
    for nu in range(nu_max + 1):
        for i, x in enumerate(xs):
            v = complex(E[i, nu])
            rows.append([nu, float(x), v.real, v.imag])
    return ["nu", "x", "re", "im"], rows, {}


def cmd_haar(cfg: ExperimentConfig) -> Table:
    p = cfg.params
    r1 = float(p["r1"])
    rows = []
    for n in range(p["n_min"], p["n_max"] + 1):
        rng = np.random.default_rng([cfg.seed, n])
        a = sample_unit_ball(p["n_samples"], 1 << (n + p["extra_levels"]), r1, rng, p["weighting"])
        err, h1 = interpolation_errors(n, a, r1, p["weighting"])
        rate = bound_constant(r1) * 2.0 ** (-n * r1 / 2)
        bad = int(np.sum(err > rate * h1 * (1 + 1e-12)))
        if bad:
            raise BoundViolation(f"{bad} samples exceed the interpolation bound at n = {n}")
        wc = worst_case_error(n, r1, n + p["trunc_offset"], p["weighting"])
        rows.append([n, float(np.max(err)), rate, wc.lower, wc.upper])
    return ["n", "measured_error", "bound", "worst_lower", "worst_upper"], rows, {"bound_constant": bound_constant(r1)}


def _sample_coefs(rng: np.random.Generator, n: int, complex_: bool) -> np.ndarray:
    c = rng.standard_normal(n)
    if complex_:
        c = c + 1j * rng.standard_normal(n)
    return c


def cmd_verify_embeddings(cfg: ExperimentConfig) -> Table:
    space = cfg.space
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    cplx = space.basis.is_complex
    fs = [CoefVector(_sample_coefs(rng, p["n_coef"], cplx)) for _ in range(p["n_samples"])]
    fs.append(CoefVector([1.0]))
    rows: list[list[Any]] = []
    meta: dict[str, Any] = {}
    for label, fn in (("G", verify_lw2), ("F", verify_l200)):
        rep = fn(space.family, p["j"], p["c0_grid"], fs, basis=space.basis, anchor=space.anchor_point)
        for c0 in rep.grid:
            for ineq, counts in (("lower", rep.lower_ok), ("upper", rep.upper_ok), ("l2", rep.l2_ok)):
                rows.append([label, c0, ineq, counts[c0], rep.n_samples, counts[c0] == rep.n_samples])
        meta[f"empirical_c0_threshold_{label}"] = rep.threshold
    # norm chain on random finitely supported product coefficients
    chain_bad = 0
    for _ in range(p["n_samples"]):
        terms = {}
        for _ in range(8):
            support = sorted(rng.choice(np.arange(1, 5), size=rng.integers(0, 4), replace=False).tolist())
            idx = tuple((int(j), int(rng.integers(1, 3))) for j in support)
            terms[idx] = complex(*rng.standard_normal(2)) if cplx else float(rng.standard_normal())
        g, h, f = norm_chain(space.family, space.basis, ProductCoefVector(terms))
        tol = 1e-12 * max(h, 1.0)
        chain_bad += not (g <= h + tol and (f is None or h <= f + tol))
    rows.append(["chain", "", "G<=H<=F", p["n_samples"] - chain_bad, p["n_samples"], chain_bad == 0])
    if chain_bad:
        raise BoundViolation(f"norm chain G <= H <= F violated by {chain_bad} samples")
    return ["check", "c0", "inequality", "passed", "total", "all_hold"], rows, meta


def cmd_summability(cfg: ExperimentConfig) -> Table:
    p = cfg.params
    rows = []
    for rep in summability_grid(cfg.space.family, p["taus"], p["sigmas"], p["trunc"]):
        rows.append(
            [
                rep.tau,
                rep.sigma,
                rep.double_sum,
                rep.row_sum,
                rep.column_sum,
                rep.double_verdict.value,
                rep.row_verdict.value,
                rep.column_verdict.value,
                rep.g5,
                rep.equivalence_holds,
            ]
        )
    cols = ["tau", "sigma", "double_sum", "row_sum", "column_sum", "double_verdict", "row_verdict", "column_verdict", "g5", "equivalence_holds"]
    return cols, rows, {"trunc": p["trunc"]}


def cmd_cost(cfg: ExperimentConfig) -> Table:
    p = cfg.params
    model = CostModel.from_dict(p["model"])
    anchor = cfg.space.anchor_point if p["anchor"] is None else float(p["anchor"])
    pts = p["points"]
    if pts is None:
        rng = np.random.default_rng(cfg.seed)
        lo, hi = cfg.space.basis.domain
        pts = []
        for _ in range(p["n_points"]):
            k = int(rng.integers(0, p["max_active"] + 1))
            pts.append({int(j): float(rng.uniform(lo, hi)) for j in rng.choice(np.arange(1, 4 * p["max_active"] + 1), k, replace=False)})
    rows = []
    total = 0.0
    for i, pt in enumerate(pts):
        act = active_variables(pt, anchor)
        cost = model(act)
        total += cost
        rows.append([i, act, cost])
    return ["point", "active", "cost"], rows, {"total_cost": total, "cost_model": model.kind}


HANDLERS: dict[str, Callable[[ExperimentConfig], Table]] = {
    "spectrum": cmd_spectrum,
    "minerr": cmd_minerr,
    "decay": cmd_decay,
    "kernel-eval": cmd_kernel_eval,
    "basis-eval": cmd_basis_eval,
    "haar": cmd_haar,
    "verify-embeddings": cmd_verify_embeddings,
    "summability": cmd_summability,
    "cost": cmd_cost,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(command: str, cfg: ExperimentConfig, table: Table, fmt: str) -> str:
    cols, rows, extra = table
    meta = {
        "tool": f"incsmooth {__version__}",
        "command": command,
        "config": cfg.source,
        "seed": cfg.seed,
        "tie_break": TIE_BREAK_RULE,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **extra,
    }
    if fmt == "json":
        body = {
            "metadata": {k: _json_value(v) for k, v in meta.items()},
            "columns": cols,
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        return json.dumps(body, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        text = json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else _cell(v)
        buf.write(f"# {k}: {text}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(command: str, config: ExperimentConfig, out: str | Path = ".", fmt: str = "csv") -> tuple[int, Path | None]:
    """Run one experiment; returns the exit code and the output path."""
    try:
        table = HANDLERS[command](config)
    except (CoordinateHorizonExceeded, BoundViolation, Divergent) as exc:
        print(f"error: certification failed for {config.name}: {exc}", file=sys.stderr)
        return EXIT_CERT, None
    except (IncSmoothError, ValueError, NotImplementedError) as exc:
        print(f"error: {config.name}: {exc}", file=sys.stderr)
        return EXIT_INVALID, None
    path = Path(out) / f"{command}_{config.name}.{fmt}"
    write_atomic(path, render(command, config, table, fmt))
    return EXIT_OK, path


def _run_path(args: tuple[str, str, str, str, int | None]) -> int:
    command, cfg_path, out, fmt, seed = args
    try:
        cfg = ExperimentConfig.load(cfg_path, command)
    except ConfigError as exc:
        print(f"error: {cfg_path}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if seed is not None:
        cfg.seed = seed
    code, path = run(command, cfg, out, fmt)
    if path is not None:
        print(path)
    return code


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="incsmooth", description="Minimal errors and kernel diagnostics for spaces of increasing smoothness.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", action="append", required=True, metavar="PATH", help="JSON config; repeat for a sweep")
        sp.add_argument("--out", default=".", metavar="DIR")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--threads", type=int, default=1, metavar="N")
        sp.add_argument("--seed", type=_u64, default=None, metavar="U64", help="overrides the config seed")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    jobs = [(args.command, p, args.out, args.format, args.seed) for p in args.config]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            codes = list(pool.map(_run_path, jobs))
    else:
        codes = [_run_path(j) for j in jobs]
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
