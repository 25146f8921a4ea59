"""Truncated trigonometric reconstruction of the source and its error analysis.

The estimator divides the grid cosine coefficients of the data by the mode
transfer factors ``b_p`` and keeps modes ``0..M``:

    c_p = [(pi/n) sum_k u~(x_k) phi_p(x_k)] / b_p,    p = 0..M.

Two conventions exist for the constant mode. ``consistent`` (default) uses the
orthonormal ``phi_0 = 1/sqrt(pi)`` together with ``b_0 = T^a / Gamma(a+1)`` (for
``R = 1``), so a noise-free round trip is exact. ``paper-literal`` reproduces
the formula in which the sample mean is divided by ``int_0^T (T-s)^{a-1} R(s) ds``
and added as a constant function; it is off by ``Gamma(alpha)`` in the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from fracinv.basis import (
    MidpointGrid,
    aliasing_term,
    as_coefficients,
    grid_coefficients,
    pad,
    synthesize,
)
from fracinv.errors import NumericalError
from fracinv.forward import ProblemSpec, kernels, lower_kernel_bound
from fracinv.mittag_leffler import mittag_leffler
from fracinv.observation import Observations

MODES = ("consistent", "paper-literal")


@dataclass(frozen=True)
class Estimate:
    coeffs: np.ndarray
    M: int
    n: int
    mode: str = "consistent"
    provenance: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return synthesize(self.coeffs, x)


def check_truncation(M: int, n: int) -> None:
    if not 1 <= M <= n - 1:
        raise ValueError(f"truncation level must satisfy 1 <= M <= n-1, got M={M}, n={n}")


def choose_M(n: int, beta: float) -> int:
    """``floor(n^(1/(5+2 beta)))`` clamped to ``[1, n-1]``."""
    if n < 2:
        raise ValueError("need n >= 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    k = 5.0 + 2.0 * beta
    M = math.floor(n ** (1.0 / k))
    # the root can land just below an exact integer (1e6 ** (1/6) = 9.999...)
    while (M + 1) ** k <= n:
        M += 1
    while M > 1 and M**k > n:
        M -= 1
    return int(min(max(M, 1), n - 1))


def _checked_kernels(spec: ProblemSpec, M: int, b: np.ndarray | None) -> np.ndarray:
    if b is None:
        b = kernels(spec, M + 1)
    b = np.asarray(b, dtype=float)[: M + 1]
    if b.size < M + 1:
        raise ValueError("not enough precomputed kernel values")
    for p in range(1, M + 1):
        # b_p >= R0 (1 - E_{a,1}(-T^a)) / p^2 holds for every admissible R
        if not b[p] >= (1.0 - 1e-9) * lower_kernel_bound(spec, p):
            raise NumericalError(f"kernel b_{p} = {b[p]} fell below its lower bound")
    if not b[0] > 0:
        raise NumericalError("kernel b_0 is not positive")
    return b


def _zero_mode_literal(spec: ProblemSpec, b0: float) -> float:
    # int_0^T (T-s)^{a-1} R(s) ds = Gamma(a) * b_0
    return gamma(spec.alpha) * b0


def estimate_coefficients(
    values: np.ndarray,
    spec: ProblemSpec,
    M: int,
    *,
    mode: str = "consistent",
    b: np.ndarray | None = None,
) -> np.ndarray:
    """Reconstructed coefficients for one sample vector or a stack of them (rows)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    check_truncation(M, n)
    b = _checked_kernels(spec, M, b)
    c = grid_coefficients(values, M + 1) / b
    if mode == "paper-literal":
        # constant term (1/n) sum u~ / int (T-s)^{a-1} R ds, stored as a phi_0 coefficient
        c[..., 0] = math.sqrt(math.pi) * values.mean(axis=-1) / _zero_mode_literal(spec, b[0])
    return c


def estimate(
    obs: Observations,
    spec: ProblemSpec,
    M: int,
    *,
    mode: str = "consistent",
    b: np.ndarray | None = None,
) -> Estimate:
    """Regularized source estimate from noisy final-time samples."""
    c = estimate_coefficients(obs.values, spec, M, mode=mode, b=b)
    return Estimate(c, M, obs.n, mode, {"seed": obs.seed, "alpha": spec.alpha, "T": spec.T})


def exact_representation(uT_coeffs, spec: ProblemSpec, n: int, M: int) -> np.ndarray:
    """Recover ``f`` from noise-free data via grid sums plus aliasing corrections.

    Modes ``p <= M`` come from the grid sums of the exact ``u(., T)`` samples
    minus ``G_np``; modes above ``M`` come directly from ``<u_T, phi_p>``.
    """
    check_truncation(M, n)
    u = as_coefficients(uT_coeffs)
    P = u.size - 1
    size = max(P, M) + 1
    b = kernels(spec, size)
    samples = synthesize(u, MidpointGrid(n).nodes)
    g = grid_coefficients(samples, M + 1)

    f = np.zeros(size)
    f[0] = (g[0] - math.sqrt(math.pi) * aliasing_term(u, 0, n)) / b[0]
    for p in range(1, M + 1):
        f[p] = (g[p] - aliasing_term(u, p, n)) / b[p]
    uu = pad(u, size)
    f[M + 1 :] = uu[M + 1 :] / b[M + 1 :]
    return f


# {{{ error analysis

@dataclass(frozen=True)
class ErrorBoundInputs:
    alpha: float
    T: float
    R0: float
    Rmax: float
    v_max: float
    E: float
    beta: float
    n: int
    M: int

    def __post_init__(self) -> None:
        if min(self.alpha, self.T, self.R0, self.Rmax, self.beta) <= 0:
            raise ValueError("alpha, T, R0, Rmax and beta must be positive")
        if self.v_max < 0 or self.E < 0:
            raise ValueError("v_max and E must be non-negative")
        if self.n < 1 or self.M < 1:
            raise ValueError("n and M must be positive")


def bound_terms(inp: ErrorBoundInputs) -> tuple[float, float, float]:
    """The three summands of the risk bound: zero mode, retained modes, truncation."""
    a, T, n, M = inp.alpha, inp.T, inp.n, inp.M
    noise = math.pi**2 * inp.v_max**2 / n
    zero = (2.0 - a) ** 2 / (inp.R0**2 * T ** (4.0 - 2.0 * a)) * (
        noise + math.pi**3 / 288.0 * inp.Rmax**2 * inp.E**2 / n**4
    )
    damp = 1.0 - mittag_leffler(a, 1.0, -(T**a))
    modes = (noise + math.pi**4 * inp.Rmax**2 * inp.E**2 / (144.0 * n**4)) * M**5 / (
        inp.R0**2 * damp**2
    )
    tail = M ** (-2.0 * inp.beta) * inp.E**2
    return zero, modes, tail


def theorem_bound(inp: ErrorBoundInputs) -> float:
    """Upper bound on the mean squared L2 error of the estimator."""
    return math.fsum(bound_terms(inp))


def error_decomposition(est: Estimate | np.ndarray, f_true) -> tuple[float, float, float]:
    """Split ``||f~ - f||^2`` into zero-mode, tail and retained-mode parts.

    Returns ``(I1, I2, I3)``: ``I1`` the squared error of the constant mode,
    ``I2 = sum_{p > M} f_p^2`` and ``I3`` the squared errors of modes ``1..M``.
    """
    c = est.coeffs if isinstance(est, Estimate) else as_coefficients(est)
    M = c.size - 1
    f = pad(as_coefficients(f_true), M + 1)
    diff = c - f[: M + 1]
    I1 = float(diff[0] ** 2)
    I3 = math.fsum(diff[1:] ** 2)
    I2 = math.fsum(f[M + 1 :] ** 2)
    return I1, I2, I3


def l2_error_sq(est: Estimate | np.ndarray, f_true) -> float:
    """``||f~ - f||^2_{L2}`` in coefficient space, including the truth's tail."""
    return math.fsum(error_decomposition(est, f_true))


def noise_variance(spec_kernels: np.ndarray, sigma: float, n: int, M: int) -> float:
    """``E[I1 + I3]`` for zero truth and constant noise level ``sigma``.

    Each retained coefficient has variance ``pi sigma^2 / (n b_p^2)``.
    """
    b = np.asarray(spec_kernels, dtype=float)[: M + 1]
    return math.pi * sigma**2 / n * math.fsum(1.0 / b**2)

# }}}
