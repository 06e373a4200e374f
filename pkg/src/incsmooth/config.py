"""Experiment configuration files.

A config is a JSON object::

    {
      "name": "c1-log4",
      "space": {
        "basis": "Trigonometric",
        "family": {"kind": "polynomial", "a_rule": "A2",
                   "r_rule": {"type": "log", "offset": 3, "slope": 4}},
        "variant": "ProductH",
        "j_max": 100000
      },
      "params": {"n_max": 100000},
      "seed": 0
    }

``space`` follows :meth:`incsmooth.kernels.SpaceSpec.from_dict`; ``params``
holds command-specific settings (see ``COMMAND_PARAMS``).  Unknown params
are rejected so that typos surface as validation errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from incsmooth.errors import ConfigError
from incsmooth.kernels import SpaceSpec
from incsmooth.weights import TABLE, validate

COMMANDS = (
    "spectrum",
    "minerr",
    "decay",
    "kernel-eval",
    "basis-eval",
    "haar",
    "verify-embeddings",
    "summability",
    "cost",
)

# command -> {param: default}
COMMAND_PARAMS: dict[str, dict[str, Any]] = {
    "spectrum": {"k": 100, "dimension": None},
    "minerr": {"n_max": 10000, "n_points": 64, "fit_min": 10},
    "decay": {"univariate_dec": None},
    "kernel-eval": {"points": None, "n_points": 10},
    "basis-eval": {"nu_max": 8, "x": None, "n_x": 9},
    "haar": {"r1": 2.0, "n_min": 0, "n_max": 8, "n_samples": 1000, "extra_levels": 6, "trunc_offset": 10, "weighting": "nu"},
    "verify-embeddings": {"j": 3, "c0_grid": [0.9, 0.5, 0.1, 0.01], "n_samples": 100, "n_coef": 16},
    "summability": {"taus": [0.5, 1.0, 2.0], "sigmas": [0.0, 1.0], "trunc": 500},
    "cost": {"model": {"kind": "linear"}, "points": None, "n_points": 16, "max_active": 8, "anchor": None},
}


@dataclass
class ExperimentConfig:
    space: SpaceSpec
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    name: str = "experiment"
    source: dict[str, Any] = field(default_factory=dict)

    def param(self, key: str) -> Any:
        return self.params[key]

    @classmethod
    def from_dict(cls, spec: Mapping[str, Any], command: str) -> "ExperimentConfig":
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
        if "space" not in spec:
            raise ConfigError("config needs a 'space' object")
        try:
            space = SpaceSpec.from_dict(spec["space"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid space: {exc}") from exc
        known = COMMAND_PARAMS[command]
        given = dict(spec.get("params", {}))
        unknown = sorted(set(given) - set(known))
        if unknown:
            raise ConfigError(f"unknown params for {command}: {unknown}; allowed: {sorted(known)}")
        params = {**known, **given}
        seed = spec.get("seed", 0)
        if not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        cfg = cls(space, params, seed, str(spec.get("name", "experiment")), dict(spec))
        cfg.check(command)
        return cfg

    @classmethod
    def load(cls, path: str | Path, command: str) -> "ExperimentConfig":
        path = Path(path)
        try:
            spec = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        spec.setdefault("name", path.stem)
        return cls.from_dict(spec, command)

    def check(self, command: str) -> None:
        """Validate the weight family and the numeric params against the module preconditions."""
        fam = self.space.family
        if not (fam.kind == TABLE and fam.extension == "none" and command == "basis-eval"):
            report = validate(fam)
            if not report.ok:
                raise ConfigError("weight family fails validation: " + "; ".join(report.problems()))
        p = self.params
        positive_ints = {
            "spectrum": ["k"],
            "minerr": ["n_max", "n_points", "fit_min"],
            "kernel-eval": ["n_points"],
            "basis-eval": ["n_x"],
            "haar": ["n_samples", "trunc_offset"],
            "verify-embeddings": ["j", "n_samples", "n_coef"],
            "summability": ["trunc"],
            "cost": ["n_points"],
        }.get(command, [])
        for key in positive_ints:
            if not isinstance(p[key], int) or p[key] < 1:
                raise ConfigError(f"param {key} must be a positive integer, got {p[key]!r}")
        if command == "minerr" and p["fit_min"] >= p["n_max"]:
            raise ConfigError("fit_min must be below n_max")
        if command == "haar":
            if not p["r1"] > 1:
                raise ConfigError("haar needs r1 > 1")
            if not 0 <= p["n_min"] <= p["n_max"]:
                raise ConfigError("haar needs 0 <= n_min <= n_max")
            if p["weighting"] not in ("nu", "block"):
                raise ConfigError("weighting must be 'nu' or 'block'")
        if command == "verify-embeddings" and not all(0 < c < 1 for c in p["c0_grid"]):
            raise ConfigError("every c0 must lie in (0, 1)")
        if command == "summability" and not (all(t > 0 for t in p["taus"]) and all(s >= 0 for s in p["sigmas"])):
            raise ConfigError("summability needs tau > 0 and sigma >= 0")
        if command == "basis-eval" and (not isinstance(p["nu_max"], int) or p["nu_max"] < 0):
            raise ConfigError("nu_max must be a non-negative integer")
