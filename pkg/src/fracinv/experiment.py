"""Monte Carlo study of the reconstruction risk as the sample count grows."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from fracinv import __version__
from fracinv.basis import MidpointGrid, basis_matrix, pad, sobolev_norm_sq
from fracinv.config import ExperimentConfig
from fracinv.estimator import ErrorBoundInputs, choose_M, estimate_coefficients, theorem_bound
from fracinv.forward import kernels
from fracinv.observation import draw_noise

#: risks below this are treated as exact recovery and excluded from rate fits
RISK_FLOOR = 1e-20

COLUMNS = ("n", "M", "risk", "stderr", "I1", "I2", "I3", "bound")


@dataclass(frozen=True)
class ResultRow:
    n: int
    M: int
    risk: float
    stderr: float
    I1: float
    I2: float
    I3: float
    bound: float


@dataclass
class ExperimentResult:
    rows: list[ResultRow]
    slope: float | None
    metadata: dict = field(default_factory=dict)
    # per-row (replicates x 3) arrays of I1, I2, I3
    replicate_terms: list[np.ndarray] = field(default_factory=list, repr=False)


def fit_rate(points) -> float:
    """Least-squares slope of ``log(risk)`` against ``log(n)``."""
    points = list(points)
    if len(points) < 2:
        raise ValueError("need at least two (n, risk) points to fit a rate")
    n = np.array([p[0] for p in points], dtype=float)
    risk = np.array([p[1] for p in points], dtype=float)
    if np.any(n <= 0) or np.any(risk <= 0):
        raise ValueError("n and risk must be positive")
    x, y = np.log(n), np.log(risk)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def _mean(values: np.ndarray) -> float:
    return math.fsum(values) / len(values)


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    m = _mean(values)
    return math.sqrt(math.fsum((values - m) ** 2) / (len(values) - 1) / len(values))


def config_hash(raw: dict) -> str:
    payload = {k: v for k, v in raw.items() if k not in ("out", "workers")}
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Repeat observe -> estimate for every ``n`` and aggregate the L2 risk.

    Replicate ``r`` at sample count ``n`` draws from its own stream keyed by
    ``(seed, n, r)``; aggregation uses exactly rounded sums, so the result does
    not depend on ``cfg.workers``.
    """
    spec, f = cfg.spec, cfg.f_true
    Ms = [choose_M(n, cfg.beta) for n in cfg.n_list]
    size = max(f.size, max(Ms) + 1)
    b = kernels(spec, size)
    u_coeffs = pad(f, size) * b
    f_full = pad(f, size)
    E = cfg.E if cfg.E is not None else math.sqrt(sobolev_norm_sq(f, cfg.beta))

    rows, terms = [], []
    for n, M in zip(cfg.n_list, Ms):
        nodes = MidpointGrid(n).nodes
        clean = basis_matrix(nodes, size) @ u_coeffs
        tail = math.fsum(f_full[M + 1 :] ** 2)

        def draw(r: int, n=n) -> np.ndarray:
            rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(n, r)))
            return draw_noise(cfg.noise, n, rng)[1]

        if cfg.workers > 1:
            with ThreadPoolExecutor(cfg.workers) as pool:
                noise = list(pool.map(draw, range(cfg.replicates)))
        else:
            noise = [draw(r) for r in range(cfg.replicates)]

        c = estimate_coefficients(clean + np.array(noise), spec, M, mode=cfg.mode, b=b)
        diff = c - f_full[: M + 1]
        parts = [(float(d[0] ** 2), tail, math.fsum(d[1:] ** 2)) for d in diff]

        arr = np.array(parts)
        risk = np.array([math.fsum(p) for p in parts])
        bound = theorem_bound(
            ErrorBoundInputs(spec.alpha, spec.T, spec.R0, spec.Rmax, cfg.noise.v_max, E, cfg.beta, n, M)
        )
        rows.append(
            ResultRow(
                n, M, _mean(risk), _stderr(risk),
                _mean(arr[:, 0]), _mean(arr[:, 1]), _mean(arr[:, 2]), bound,
            )
        )
        terms.append(arr)

    slope = None
    if len(rows) >= 2 and all(row.risk > RISK_FLOOR for row in rows):
        slope = fit_rate([(row.n, row.risk) for row in rows])

    metadata = {
        "version": __version__,
        "seed": cfg.seed,
        "config_sha256": config_hash(cfg.raw) if cfg.raw else "",
        "replicates": cfg.replicates,
        "mode": cfg.mode,
        "E": repr(E),
        "slope": "nan" if slope is None else f"{slope:.17g}",
    }
    return ExperimentResult(rows, slope, metadata, terms)


def result_to_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    for key, val in result.metadata.items():
        buf.write(f"# {key}={val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in result.rows:
        writer.writerow([row.n, row.M] + [f"{getattr(row, c):.17g}" for c in COLUMNS[2:]])
    return buf.getvalue()


def read_result_csv(path) -> tuple[dict, list[dict]]:
    """Parse a result CSV back into ``(metadata, rows)``."""
    meta, lines = {}, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
            else:
                lines.append(line)
    rows = []
    for rec in csv.DictReader(lines):
        rows.append({k: (int(v) if k in ("n", "M") else float(v)) for k, v in rec.items()})
    return meta, rows
