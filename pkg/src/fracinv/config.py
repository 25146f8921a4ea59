"""YAML configuration for problems, sources, noise and experiments.

Schema (all sections optional unless a command needs them)::

    problem:
      alpha: 0.5
      T: 1.0
      R: 1.0                    # constant, or
      # R: {expr: "2 + sin(t)", R0: 1.0, Rmax: 3.0}
    source:
      kind: power               # f_p = p^-decay for p = 1..P, f_0 = mean
      P: 64
      decay: 3.0
      mean: 0.0
      # kind: coefficients
      # coeffs: [0.0, 1.0, 0.5]
    beta: 2.0
    E: null                     # H^beta bound; default is the true norm of the source
    noise: {v_max: 0.1, sigma_mode: constant}
    n: 1024                     # single-observation commands
    n_list: [256, 512, 1024]
    replicates: 200
    seed: 12345
    mode: consistent            # or paper-literal
    workers: 1
    out: results.csv
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from fracinv.basis import as_coefficients
from fracinv.errors import ConfigError
from fracinv.estimator import MODES
from fracinv.forward import ProblemSpec
from fracinv.observation import NoiseSpec

_R_NAMESPACE = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sinh", "cosh", "tanh", "pi")
}


def load_config(path) -> dict:
    try:
        with Path(path).open() as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return data


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing key '{key}' in {where}")
    return section[key]


def make_R(expr: str):
    """Turn an expression in ``t`` into a vectorized callable."""
    try:
        code = compile(expr, "<R(t)>", "eval")
    except SyntaxError as exc:
        raise ConfigError(f"invalid R expression {expr!r}: {exc}") from exc
    for name in code.co_names:
        if name != "t" and name not in _R_NAMESPACE:
            raise ConfigError(f"R expression uses unknown name {name!r}")

    def R(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(eval(code, {"__builtins__": {}}, {**_R_NAMESPACE, "t": t}), t.shape) * 1.0

    return R


def problem_from_dict(d: dict) -> ProblemSpec:
    if not isinstance(d, dict):
        raise ConfigError("'problem' must be a mapping")
    try:
        alpha = float(_require(d, "alpha", "problem"))
        T = float(d.get("T", 1.0))
        R = d.get("R", 1.0)
        if isinstance(R, (int, float)):
            return ProblemSpec.constant(alpha, T, float(R))
        if isinstance(R, dict):
            expr = str(_require(R, "expr", "problem.R"))
            return ProblemSpec(
                alpha,
                T,
                make_R(expr),
                float(_require(R, "R0", "problem.R")),
                float(_require(R, "Rmax", "problem.R")),
                label=expr,
            )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid problem: {exc}") from exc
    raise ConfigError("problem.R must be a number or a mapping with expr/R0/Rmax")


def source_from_dict(d) -> np.ndarray:
    if isinstance(d, list):
        d = {"kind": "coefficients", "coeffs": d}
    if not isinstance(d, dict):
        raise ConfigError("'source' must be a mapping or a list of coefficients")
    kind = d.get("kind", "coefficients")
    try:
        if kind == "coefficients":
            return as_coefficients(_require(d, "coeffs", "source"))
        if kind == "power":
            P = int(_require(d, "P", "source"))
            decay = float(_require(d, "decay", "source"))
            if P < 1:
                raise ConfigError("source.P must be >= 1")
            c = np.zeros(P + 1)
            c[0] = float(d.get("mean", 0.0))
            c[1:] = np.arange(1, P + 1, dtype=float) ** -decay
            return c
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid source: {exc}") from exc
    raise ConfigError(f"unknown source kind {kind!r}")


def noise_from_dict(d: dict | None, seed: int) -> NoiseSpec:
    d = d or {}
    try:
        return NoiseSpec(float(d.get("v_max", 0.0)), str(d.get("sigma_mode", "constant")), int(seed))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid noise: {exc}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    spec: ProblemSpec
    f_true: np.ndarray = field(compare=False)
    beta: float
    noise: NoiseSpec
    n_list: tuple[int, ...]
    replicates: int = 100
    seed: int = 0
    E: float | None = None
    mode: str = "consistent"
    workers: int = 1
    out: str | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not self.n_list:
            raise ConfigError("n_list must not be empty")
        if any(n < 4 for n in self.n_list):
            raise ConfigError("every n must be >= 4")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigError("n_list must be strictly increasing")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


def apply_overrides(raw: dict, **overrides: Any) -> dict:
    """Copy of ``raw`` with every non-``None`` override set at top level."""
    out = copy.deepcopy(raw)
    for key, val in overrides.items():
        if val is not None:
            out[key] = val
    return out


def experiment_from_dict(raw: dict) -> ExperimentConfig:
    spec = problem_from_dict(_require(raw, "problem", "config"))
    f_true = source_from_dict(_require(raw, "source", "config"))
    seed = int(raw.get("seed", 0))
    try:
        n_list = tuple(int(n) for n in _require(raw, "n_list", "config"))
        return ExperimentConfig(
            spec=spec,
            f_true=f_true,
            beta=float(raw.get("beta", 2.0)),
            noise=noise_from_dict(raw.get("noise"), seed),
            n_list=n_list,
            replicates=int(raw.get("replicates", 100)),
            seed=seed,
            E=None if raw.get("E") is None else float(raw["E"]),
            mode=str(raw.get("mode", "consistent")),
            workers=int(raw.get("workers", 1)),
            out=raw.get("out"),
            raw=raw,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid experiment config: {exc}") from exc
