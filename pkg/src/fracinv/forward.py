r"""Forward map from a source ``f`` to the final-time data ``u(., T)``.

For ``D_t^alpha u - u_xx = R(t) f(x)`` on ``(0, pi)`` with homogeneous Neumann
conditions and ``u(., 0) = 0`` every cosine mode evolves independently and

.. math::

    \langle u(\cdot, T), \phi_p \rangle = \langle f, \phi_p \rangle\, b_p, \qquad
    b_p = \int_0^T (T - s)^{\alpha - 1} E_{\alpha,\alpha}(-p^2 (T - s)^\alpha) R(s)\, ds.

:func:`l1_oracle` solves the same problem by finite differences and is used to
cross-check the spectral path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.special import gamma

from fracinv.basis import as_coefficients, synthesize
from fracinv.errors import NumericalError
from fracinv.mittag_leffler import mittag_leffler
from fracinv.quadrature import adaptive_gauss_legendre

KERNEL_RTOL = 1e-12


def _constant(c: float) -> Callable:
    def R(t):
        return np.full(np.shape(t), c, dtype=float) if np.ndim(t) else c

    return R


@dataclass(frozen=True)
class ProblemSpec:
    """Fractional order, final time and the known time factor ``R``.

    ``R0`` and ``Rmax`` are the declared bounds ``inf R`` and ``sup |R|`` on
    ``[0, T]``; they enter the error bound and are spot-checked here.
    """

    alpha: float
    T: float
    R: Callable = field(compare=False)
    R0: float
    Rmax: float
    label: str = ""

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not 0.0 < self.R0 <= self.Rmax:
            raise ValueError("need 0 < R0 <= Rmax")
        t = np.linspace(0.0, self.T, 101)
        r = self.R_at(t)
        slack = 1e-12 * self.Rmax
        if np.any(r < self.R0 - slack) or np.any(np.abs(r) > self.Rmax + slack):
            raise ValueError("R(t) violates the declared bounds R0 <= R <= Rmax")

    @classmethod
    def constant(cls, alpha: float, T: float, c: float = 1.0) -> "ProblemSpec":
        return cls(alpha, T, _constant(c), c, c, label=repr(float(c)))

    def R_at(self, t) -> np.ndarray:
        """Evaluate ``R`` on an array, falling back to a loop for scalar callables."""
        t = np.asarray(t, dtype=float)
        try:
            r = np.asarray(self.R(t), dtype=float)
        except TypeError:
            r = None
        if r is None or r.shape != t.shape:
            r = np.array([float(self.R(ti)) for ti in t.ravel()]).reshape(t.shape)
        return r

    def is_constant_R(self) -> bool:
        return self.R0 == self.Rmax


def kernel(spec: ProblemSpec, p: int) -> float:
    """The mode-``p`` transfer factor ``b_p`` (always positive).

    Computed after the substitution ``u = (T - s)^alpha``, which turns the
    weakly singular integral into
    ``(1/alpha) int_0^{T^alpha} E_{alpha,alpha}(-p^2 u) R(T - u^{1/alpha}) du``.
    For ``p = 0`` the Mittag-Leffler factor is ``1/Gamma(alpha)``.
    """
    if p < 0:
        raise ValueError("mode index must be non-negative")
    a, T = spec.alpha, spec.T
    lam = float(p) ** 2
    upper = T**a

    def integrand(u):
        return mittag_leffler(a, a, -lam * u) * spec.R_at(T - u ** (1.0 / a)) / a

    # the integrand varies on the scale 1/p^2 near u = 0
    brk = [] if p == 0 else [upper * 4.0**-j for j in range(1, 40) if upper * 4.0**-j > 1e-3 / lam]
    value, err = adaptive_gauss_legendre(integrand, 0.0, upper, rtol=KERNEL_RTOL, breakpoints=brk)
    if not value > 0.0:
        raise NumericalError(f"kernel b_{p} is not positive ({value})", estimate=err)
    return value


def kernels(spec: ProblemSpec, num_modes: int) -> np.ndarray:
    """``[b_0, ..., b_{num_modes-1}]``."""
    return np.array([kernel(spec, p) for p in range(num_modes)])


def kernel_closed_form(alpha: float, T: float, p: int, c: float = 1.0) -> float:
    """``b_p`` for constant ``R = c`` via ``int_0^T s^{a-1} E_{a,a}(-p^2 s^a) ds``."""
    if p == 0:
        return c * T**alpha / gamma(alpha + 1.0)
    lam = float(p) ** 2
    return c * (1.0 - mittag_leffler(alpha, 1.0, -lam * T**alpha)) / lam


def lower_kernel_bound(spec: ProblemSpec, p: int) -> float:
    """``R0 (1 - E_{alpha,1}(-T^alpha)) / p^2`` for ``p >= 1``."""
    return spec.R0 * (1.0 - mittag_leffler(spec.alpha, 1.0, -(spec.T**spec.alpha))) / p**2


def forward_map(spec: ProblemSpec, f, b: np.ndarray | None = None) -> np.ndarray:
    """Cosine coefficients of ``u(., T)`` for source coefficients ``f``."""
    f = as_coefficients(f)
    if b is None:
        b = kernels(spec, f.size)
    return f * b[: f.size]


def evaluate_uT(spec: ProblemSpec, f, x):
    """Final-time solution ``u(x, T)`` evaluated pointwise."""
    return synthesize(forward_map(spec, f), x)


def l1_oracle(spec: ProblemSpec, f, nx: int, nt: int) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference reference solution at ``t = T``.

    Space: second-order central differences on ``x_j = j pi / nx`` with ghost
    points ``u_{-1} = u_1``, ``u_{nx+1} = u_{nx-1}``. Time: the L1 scheme on a
    uniform grid of ``nt`` steps,

    ``D^alpha u(t_m) ~ sum_j w_j (u^{m-j} - u^{m-j-1}) / (Gamma(2-alpha) dt^alpha)``
    with ``w_j = (j+1)^{1-alpha} - j^{1-alpha}``.

    The implicit system is solved in the eigenbasis of the discrete Laplacian
    (exact up to round-off), keeping only components the source excites.

    Returns ``(x, u)`` with ``x`` the ``nx + 1`` grid nodes.
    """
    if nx < 8 or nt < 8:
        raise ValueError("l1_oracle needs nx, nt >= 8")
    a, T = spec.alpha, spec.T
    h = math.pi / nx
    x = np.linspace(0.0, math.pi, nx + 1)
    fx = synthesize(f, x)

    # W A is symmetric, with W the trapezoid weights (1/2 at both ends)
    A = (np.diag(np.full(nx + 1, 2.0)) - np.diag(np.ones(nx), 1) - np.diag(np.ones(nx), -1)) / h**2
    A[0, 1] = A[nx, nx - 1] = -2.0 / h**2
    w = np.ones(nx + 1)
    w[0] = w[-1] = 0.5
    lam, V = scipy.linalg.eigh(np.diag(w) @ A, np.diag(w))
    xi = V.T @ (w * fx)
    keep = np.abs(xi) > 1e-14 * max(np.max(np.abs(xi)), 1e-300)
    lam, V, xi = lam[keep], V[:, keep], xi[keep]

    dt = T / nt
    c0 = 1.0 / (gamma(2.0 - a) * dt**a)
    j = np.arange(nt + 1, dtype=float)
    weights = (j + 1.0) ** (1.0 - a) - j ** (1.0 - a)
    Rt = spec.R_at(dt * np.arange(nt + 1))

    diffs = np.zeros((nt + 1, lam.size))
    u = np.zeros(lam.size)
    denom = c0 + lam
    for m in range(1, nt + 1):
        hist = weights[m - 1 : 0 : -1] @ diffs[1:m] if m > 1 else 0.0
        u_new = (c0 * u - c0 * hist + Rt[m] * xi) / denom
        diffs[m] = u_new - u
        u = u_new
    if not np.all(np.isfinite(u)):
        raise NumericalError("L1 time stepping produced non-finite values")
    return x, V @ u
