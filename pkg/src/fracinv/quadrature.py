"""Globally adaptive Gauss-Legendre quadrature for vectorized integrands."""

from __future__ import annotations

import heapq
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from fracinv.errors import NumericalError


@lru_cache(maxsize=8)
def _rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _gl(f, a: float, b: float, order: int) -> float:
    x, w = _rule(order)
    half = 0.5 * (b - a)
    return half * float(np.dot(w, f(half * x + 0.5 * (a + b))))


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    rtol: float = 1e-12,
    atol: float = 0.0,
    order: int = 20,
    breakpoints: Sequence[float] = (),
    max_intervals: int = 4000,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``, returning ``(value, error_estimate)``.

    Each panel is estimated twice, once whole and once as two halves; the
    difference is the panel's error estimate. The panel with the largest error
    is bisected until the total error drops below ``max(atol, rtol*|value|)``.

    :raises NumericalError: if ``max_intervals`` panels do not reach the
        requested tolerance.
    """
    edges = sorted({a, b, *(t for t in breakpoints if a < t < b)})

    def panel(lo: float, hi: float):
        mid = 0.5 * (lo + hi)
        left = _gl(f, lo, mid, order)
        right = _gl(f, mid, hi, order)
        coarse = _gl(f, lo, hi, order)
        return left + right, abs(left + right - coarse)

    heap: list[tuple[float, float, float, float]] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = panel(lo, hi)
        heapq.heappush(heap, (-err, lo, hi, val))

    while True:
        total = sum(item[3] for item in heap)
        error = sum(-item[0] for item in heap)
        if error <= max(atol, rtol * abs(total)):
            return total, error
        if len(heap) >= max_intervals:
            raise NumericalError(
                f"adaptive quadrature did not converge (error estimate {error:.3e})",
                estimate=error,
            )
        _, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        for sub in ((lo, mid), (mid, hi)):
            val, err = panel(*sub)
            heapq.heappush(heap, (-err, sub[0], sub[1], val))
