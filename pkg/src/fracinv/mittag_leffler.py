r"""Two-parameter Mittag-Leffler function on the negative real axis.

.. math::

    E_{\alpha,\beta}(z) = \sum_{k=0}^\infty \frac{z^k}{\Gamma(\alpha k + \beta)},
    \qquad z \le 0,\; 0 < \alpha \le 1,\; 0 < \beta \le 2.

Three branches are combined, selected per point with ``s = |z|^{1/alpha}``
(the exponent controlling both the series cancellation and the asymptotic
truncation error):

* double-precision power series for small ``s``,
* the algebraic asymptotic expansion
  :math:`-\sum_{k\ge1} z^{-k}/\Gamma(\beta-\alpha k)` for large ``s``,
* an extended-precision (``mpmath``) power series in between.

Every branch reports an error estimate; a point only leaves the cheap branches
when the estimate exceeds :data:`TARGET_RTOL`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import gammaln, rgamma

from fracinv.errors import NumericalError

#: relative accuracy every branch must certify before its value is accepted
TARGET_RTOL = 1e-12

#: the double-precision series is only attempted below this ``s``
SERIES_S_MAX = 8.0
#: the asymptotic expansion is only attempted above this ``s``
ASYMPTOTIC_S_MIN = 20.0
#: for alpha == 1 the expansion omits an exp(z) term; require it to be negligible
ASYMPTOTIC_X_MIN_ALPHA1 = 45.0

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MlfQuery:
    """A validated point ``(alpha, beta, z)`` for :func:`mlf`."""

    alpha: float
    beta: float
    z: float

    def __post_init__(self) -> None:
        _check_parameters(self.alpha, self.beta)
        if not self.z <= 0.0:
            raise ValueError(f"z must be <= 0, got {self.z}")


def _check_parameters(alpha: float, beta: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0.0 < beta <= 2.0:
        raise ValueError(f"beta must lie in (0, 2], got {beta}")


# {{{ branches

def series_double(alpha: float, beta: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Power series for ``E(-x)`` in double precision.

    Returns ``(value, abs_error_estimate)``. The estimate accounts for the
    rounding of individual terms, which compensated summation cannot remove.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.max(x) ** (1.0 / alpha) if x.size else 0.0
    kmax = int(min(4000, (2.0 * s + 40.0) / alpha + 10))
    k = np.arange(kmax + 1, dtype=float)[:, None]

    with np.errstate(divide="ignore"):
        logx = np.log(x)[None, :]
    logt = np.where(k == 0, 0.0, k * logx) - gammaln(alpha * k + beta)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    terms = sign * np.exp(logt)

    value = np.sum(terms, axis=0)
    error = 8.0 * _EPS * np.sum((1.0 + np.abs(logt)) * np.abs(terms), axis=0) + np.abs(terms[-1])
    return value, error


def asymptotic(alpha: float, beta: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Asymptotic expansion of ``E(-x)`` truncated near its smallest term.

    Returns ``(value, abs_error_estimate)`` where the estimate is a bound on the
    first omitted term obtained from the reflection formula.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    logx = np.log(x)
    value = np.zeros_like(x)
    error = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    prev_env = np.full_like(x, np.inf)

    for k in range(1, 4001):
        if not active.any():
            break
        w = 1.0 - beta + alpha * k
        term = -((-1.0) ** k) * np.exp(-k * logx[active]) * rgamma(beta - alpha * k)
        if w > 0:
            env = np.exp(-k * logx[active] + gammaln(w)) / math.pi
        else:
            env = np.abs(term)

        idx = np.flatnonzero(active)
        growing = env > prev_env[idx]
        # stop before adding a term once the envelope starts to grow
        stop_grow = idx[growing]
        error[stop_grow] = env[growing]
        active[stop_grow] = False

        keep = ~growing
        idx, term, env = idx[keep], term[keep], env[keep]
        value[idx] += term
        prev_env[idx] = env

        done = env <= 1e-17 * np.abs(value[idx])
        error[idx[done]] = env[done]
        active[idx[done]] = False

    return value, error


@lru_cache(maxsize=64)
def _rgamma_table(alpha: float, beta: float, prec: int, kmax: int) -> tuple[tuple[int, int], ...]:
    """``1/Gamma(alpha k + beta)`` for ``k = 0..kmax`` as ``(mantissa, exponent)`` pairs."""
    with mpmath.workprec(prec):
        a, b = mpmath.mpf(alpha), mpmath.mpf(beta)
        table = []
        for k in range(kmax + 1):
            v = mpmath.rgamma(a * k + b)
            table.append((int(v.man) if v >= 0 else -int(v.man), int(v.exp)))
        return tuple(table)


def series_mp(alpha: float, beta: float, x: float) -> float:
    """Power series for ``E(-x)`` summed in extended-precision fixed point.

    Terms reach ``~exp(x**(1/alpha))`` before cancelling down to ``O(1/x)``, so
    the number of fractional bits grows with ``s = x**(1/alpha)``.
    """
    if x == 0.0:
        return float(rgamma(beta))
    s = x ** (1.0 / alpha)
    prec = int(96 + s / math.log(2.0) + 4.0 * math.log2(2.0 + x))
    prec = 64 * (prec // 64 + 1)

    num, den = x.as_integer_ratio()
    X = (num << prec) // den
    power = 1 << prec
    total = 0
    kmax = 64
    table = _rgamma_table(alpha, beta, prec, kmax)
    k = 0
    while True:
        if k > kmax:
            kmax *= 2
            if kmax > 1 << 18:
                raise NumericalError(
                    f"Mittag-Leffler series did not converge for alpha={alpha}, x={x}"
                )
            table = _rgamma_table(alpha, beta, prec, kmax)
        man, exp = table[k]
        term = power * man
        term = term << exp if exp >= 0 else term >> -exp
        total += -term if k % 2 else term
        if alpha * k > s + 1 and abs(term) << 64 <= abs(total):
            break
        power = (power * X) >> prec
        k += 1
    return total / (1 << prec)

# }}}


def mittag_leffler(alpha: float, beta: float, z):
    """Evaluate ``E_{alpha,beta}(z)`` for real ``z <= 0``.

    ``z`` may be a scalar or an array; the result has the same shape.
    Relative accuracy is better than ``1e-10`` for ``|z| <= 1e6``.

    :raises ValueError: if ``alpha`` is outside ``(0, 1]``, ``beta`` outside
        ``(0, 2]`` or any ``z > 0``.
    """
    _check_parameters(alpha, beta)
    alpha, beta = float(alpha), float(beta)
    z_arr = np.asarray(z, dtype=float)
    if np.any(~(z_arr <= 0.0)):
        raise ValueError("Mittag-Leffler evaluation is restricted to z <= 0")

    x = -z_arr.ravel()
    out = np.full(x.shape, np.nan)

    if alpha == 1.0 and beta == 1.0:
        out = np.exp(-x)
        return out.reshape(z_arr.shape) if z_arr.ndim else float(out[0])

    zero = x == 0.0
    out[zero] = rgamma(beta)
    with np.errstate(over="ignore"):
        s = x ** (1.0 / alpha)

    todo = ~zero
    cand = todo & (s <= SERIES_S_MAX)
    if cand.any():
        val, err = series_double(alpha, beta, x[cand])
        ok = err <= TARGET_RTOL * np.abs(val)
        idx = np.flatnonzero(cand)[ok]
        out[idx] = val[ok]
        todo[idx] = False

    cand = todo & (s >= ASYMPTOTIC_S_MIN)
    if alpha == 1.0:
        cand &= x >= ASYMPTOTIC_X_MIN_ALPHA1
    if cand.any():
        val, err = asymptotic(alpha, beta, x[cand])
        ok = err <= TARGET_RTOL * np.abs(val)
        idx = np.flatnonzero(cand)[ok]
        out[idx] = val[ok]
        todo[idx] = False

    for i in np.flatnonzero(todo):
        out[i] = series_mp(alpha, beta, float(x[i]))

    return out.reshape(z_arr.shape) if z_arr.ndim else float(out[0])


def mlf(query: MlfQuery) -> float:
    """Scalar evaluation of a validated :class:`MlfQuery`."""
    return mittag_leffler(query.alpha, query.beta, query.z)


def mlf_one(alpha: float, x):
    """Shorthand for ``E_{alpha,1}(-x)`` with ``x >= 0``."""
    if np.any(np.asarray(x) < 0):
        raise ValueError("mlf_one expects a non-negative argument")
    return mittag_leffler(alpha, 1.0, -np.asarray(x, dtype=float) if np.ndim(x) else -float(x))
