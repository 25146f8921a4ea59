"""Noisy point samples of the final-time data on the midpoint grid."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fracinv.basis import MidpointGrid
from fracinv.forward import ProblemSpec, evaluate_uT

SIGMA_MODES = ("constant", "uniform")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise scales ``sigma_k`` bounded by ``v_max`` and the seed of the draw.

    ``constant`` uses ``sigma_k = v_max / 2``; ``uniform`` draws each
    ``sigma_k`` from ``[0, v_max)``.
    """

    v_max: float = 0.0
    sigma_mode: str = "constant"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.v_max < 0:
            raise ValueError("v_max must be non-negative")
        if self.sigma_mode not in SIGMA_MODES:
            raise ValueError(f"sigma_mode must be one of {SIGMA_MODES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class Observations:
    grid: MidpointGrid
    values: np.ndarray
    sigmas: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.n,) or self.sigmas.shape != (self.grid.n,):
            raise ValueError("values and sigmas must have one entry per grid node")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("observations must be finite")

    @property
    def n(self) -> int:
        return self.grid.n


def replicate_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Independent, reproducible stream for replicate ``r`` of a seeded run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


def draw_noise(noise: NoiseSpec, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(sigma, sigma * eps)`` with ``eps ~ N(0, 1)`` i.i.d."""
    if noise.sigma_mode == "constant":
        sigma = np.full(n, 0.5 * noise.v_max)
    else:
        sigma = noise.v_max * rng.random(n)
    eps = rng.standard_normal(n)
    return sigma, sigma * eps


def observe(
    spec: ProblemSpec,
    f,
    n: int,
    noise: NoiseSpec,
    *,
    replicate: int = 0,
    clean: np.ndarray | None = None,
) -> Observations:
    """Sample ``u(x_k, T) + sigma_k eps_k`` at the ``n`` midpoint nodes.

    ``clean`` may carry precomputed noise-free samples to skip the forward
    solve when many replicates share the same truth.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    grid = MidpointGrid(n)
    if clean is None:
        clean = evaluate_uT(spec, f, grid.nodes)
    sigma, noise_values = draw_noise(noise, n, replicate_rng(noise.seed, replicate))
    return Observations(grid, clean + noise_values, sigma, noise.seed)


def write_observations_csv(obs: Observations, path, *, metadata: dict | None = None) -> None:
    """CSV with columns ``k, x_k, u_tilde, sigma`` and ``#`` metadata lines."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# seed={obs.seed}\n")
        fh.write(f"# n={obs.n}\n")
        for key, val in (metadata or {}).items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "x_k", "u_tilde", "sigma"])
        for k, (x, v, s) in enumerate(zip(obs.grid.nodes, obs.values, obs.sigmas), start=1):
            writer.writerow([k, f"{x:.17g}", f"{v:.17g}", f"{s:.17g}"])


def read_observations_csv(path) -> Observations:
    path = Path(path)
    seed = None
    rows = []
    with path.open(newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "seed" and val.strip() not in ("", "None"):
                    seed = int(val)
            else:
                lines.append(line)
        reader = csv.DictReader(lines)
        for row in reader:
            rows.append((int(row["k"]), float(row["x_k"]), float(row["u_tilde"]), float(row["sigma"])))
    rows.sort()
    n = len(rows)
    grid = MidpointGrid(n)
    if [r[0] for r in rows] != list(range(1, n + 1)):
        raise ValueError("observation rows must be indexed k = 1..n")
    if not np.allclose([r[1] for r in rows], grid.nodes, rtol=0, atol=1e-12):
        raise ValueError("observation nodes do not match the midpoint grid")
    values = np.array([r[2] for r in rows])
    sigmas = np.array([r[3] for r in rows])
    return Observations(grid, values, sigmas, seed)
