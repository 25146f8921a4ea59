"""Relative error of the Mittag-Leffler evaluator against mpmath on a log grid of arguments."""

import argparse

import mpmath
import numpy as np

from fracinv.mittag_leffler import mittag_leffler


def reference(alpha: float, beta: float, x: float) -> float:
    # mpmath's series with enough working digits to absorb the cancellation
    dps = int(30 + x ** (1 / alpha) / 2.3)
    with mpmath.workdps(dps):
        a, b, z = mpmath.mpf(alpha), mpmath.mpf(beta), -mpmath.mpf(x)
        total, k, term = mpmath.mpf(0), 0, mpmath.mpf(1)
        while k * alpha < x ** (1 / alpha) + 5 or abs(term) > mpmath.eps * abs(total):
            term = z**k * mpmath.rgamma(a * k + b)
            total += term
            k += 1
        return float(total)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=25)
    ap.add_argument("--xmax", type=float, default=60.0)
    args = ap.parse_args()

    for alpha in (0.25, 0.5, 0.75, 0.95):
        # keep x^(1/alpha) moderate so the brute-force reference stays cheap
        xs = np.geomspace(1e-3, min(args.xmax, 300.0**alpha), args.points)
        for beta in (alpha, 1.0):
            got = mittag_leffler(alpha, beta, -xs)
            err = max(abs(g / reference(alpha, beta, float(x)) - 1) for g, x in zip(got, xs))
            print(f"alpha={alpha:<5} beta={beta:<5} max rel err {err:.2e}")


if __name__ == "__main__":
    main()
