"""Neumann cosine basis on (0, pi) and its discrete counterpart on the midpoint grid.

Conventions: ``phi_0 = 1/sqrt(pi)`` and ``phi_p = sqrt(2/pi) cos(p x)`` for
``p >= 1``, so the family is orthonormal in ``L^2(0, pi)``. Coefficient vectors
are plain 1-d arrays indexed by mode, ``c[p] = <f, phi_p>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


def as_coefficients(c) -> np.ndarray:
    """Validate a coefficient sequence and return it as a float array."""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coefficients must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    return c


def pad(c: np.ndarray, size: int) -> np.ndarray:
    """Zero-pad (or keep) ``c`` to at least ``size`` entries."""
    if c.size >= size:
        return c
    return np.concatenate([c, np.zeros(size - c.size)])


@dataclass(frozen=True)
class MidpointGrid:
    """The ``n`` sampling nodes ``x_k = pi (2k - 1) / (2n)``, ``k = 1..n``."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"grid size must be positive, got {self.n}")

    @property
    def nodes(self) -> np.ndarray:
        k = np.arange(1, self.n + 1)
        return np.pi * (2 * k - 1) / (2 * self.n)


def eval_basis(p, x):
    """Evaluate ``phi_p(x)``; broadcasts over ``p`` and ``x``."""
    p = np.asarray(p)
    x = np.asarray(x, dtype=float)
    if np.any(p < 0):
        raise ValueError("mode index must be non-negative")
    val = np.where(p == 0, INV_SQRT_PI, SQRT_2_OVER_PI * np.cos(p * x))
    return val if val.ndim else float(val)


def basis_matrix(x, num_modes: int) -> np.ndarray:
    """Matrix ``B[i, p] = phi_p(x_i)`` for ``p = 0..num_modes-1``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = np.arange(num_modes)
    return eval_basis(p[None, :], x[:, None])


def synthesize(c, x):
    """Evaluate ``sum_p c[p] phi_p(x)``."""
    c = as_coefficients(c)
    scalar = np.ndim(x) == 0
    val = basis_matrix(x, c.size) @ c
    return float(val[0]) if scalar else val


def sobolev_norm_sq(c, beta: float) -> float:
    """``sum_{p >= 1} p^(2 beta) c_p^2``; the constant mode does not contribute."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    c = as_coefficients(c)
    p = np.arange(1, c.size)
    return math.fsum(p ** (2.0 * beta) * c[1:] ** 2)


# {{{ discrete identities on the midpoint grid

def _resonance(m, n: int):
    """``(1/n) sum_k cos(m x_k)``: ``(-1)^l`` when ``m = 2 l n``, else 0."""
    m = np.abs(np.asarray(m))
    hit = m % (2 * n) == 0
    sign = np.where((m // (2 * n)) % 2 == 0, 1.0, -1.0)
    return np.where(hit, sign, 0.0)


def discrete_orthogonality(p: int, q: int, n: int) -> float:
    """Grid inner product ``s_pq = (1/n) sum_k phi_p(x_k) phi_q(x_k)``."""
    x = MidpointGrid(n).nodes
    return math.fsum(eval_basis(p, x) * eval_basis(q, x)) / n


def discrete_orthogonality_closed_form(p: int, q: int, n: int) -> float:
    """Closed form of :func:`discrete_orthogonality` valid for all ``p, q >= 0``.

    For ``1 <= p <= n-1`` this is the familiar table: ``1/pi`` on ``p = q`` or
    the resonances ``q -+ p = 2 l n`` with ``l`` even, ``-1/pi`` with ``l`` odd,
    and 0 elsewhere.
    """
    if p == 0 and q == 0:
        return 1.0 / math.pi
    if p == 0 or q == 0:
        m = q if p == 0 else p
        return math.sqrt(2.0) / math.pi * float(_resonance(m, n))
    return float(_resonance(p - q, n) + _resonance(p + q, n)) / math.pi


def grid_mode_mean(p: int, n: int) -> float:
    """``(1/n) sum_k phi_p(x_k)`` for ``p >= 1``, i.e. ``(-1)^l sqrt(2/pi)`` at ``p = 2 l n``."""
    if p < 1:
        raise ValueError("grid_mode_mean is defined for p >= 1")
    return SQRT_2_OVER_PI * float(_resonance(p, n))


def grid_coefficients(values, num_modes: int) -> np.ndarray:
    """Quadrature coefficients ``(pi/n) sum_k v_k phi_p(x_k)`` for ``p < num_modes``.

    ``values`` holds samples at the midpoint nodes; a 2-d array is treated as a
    stack of sample vectors (one per row).
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    B = basis_matrix(MidpointGrid(n).nodes, num_modes)
    return (np.pi / n) * (values @ B)


def aliasing_term(u_coeffs, p: int, n: int) -> float:
    r"""Aliasing correction ``G_np`` for a bandlimited ``u``.

    ``sqrt(2/pi) sum_l (-1)^l u_{2ln}`` for ``p = 0`` and
    ``sum_l (-1)^l (u_{p+2ln} + u_{2ln-p})`` for ``1 <= p <= n-1``.
    The grid coefficient of mode ``p >= 1`` equals ``u_p + G_np``; for the
    constant mode ``(sqrt(pi)/n) sum_k u(x_k) = u_0 + sqrt(pi) G_n0``.
    """
    if not 0 <= p < n:
        raise ValueError(f"aliasing term needs 0 <= p <= n-1, got p={p}, n={n}")
    u = as_coefficients(u_coeffs)
    P = u.size - 1
    total = []
    l = 1
    while 2 * l * n - p <= P:
        sign = -1.0 if l % 2 else 1.0
        if p == 0:
            total.append(sign * u[2 * l * n])
        else:
            hi = p + 2 * l * n
            total.append(sign * ((u[hi] if hi <= P else 0.0) + u[2 * l * n - p]))
        l += 1
    g = math.fsum(total)
    return SQRT_2_OVER_PI * g if p == 0 else g

# }}}
