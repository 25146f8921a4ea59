"""Compare the Monte Carlo risk with the explicit error bound over a small grid of settings."""

import argparse

from fracinv.config import experiment_from_dict
from fracinv.experiment import run_experiment


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--replicates", type=int, default=500)
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()

    for alpha in (0.4, 0.8):
        for v_max in (0.05, 0.2):
            raw = {
                "problem": {"alpha": alpha, "T": 1.0, "R": {"expr": "2 + sin(t)", "R0": 1.0, "Rmax": 3.0}},
                "source": {"kind": "power", "P": 32, "decay": 3.0, "mean": 0.5},
                "beta": 2.0,
                "noise": {"v_max": v_max},
                "n_list": [256, 1024, 4096],
                "replicates": args.replicates,
                "seed": args.seed,
            }
            res = run_experiment(experiment_from_dict(raw))
            for r in res.rows:
                ratio = r.risk / r.bound
                print(f"alpha={alpha} V={v_max:<5} n={r.n:5d} M={r.M}  risk={r.risk:.3e}  "
                      f"bound={r.bound:.3e}  risk/bound={ratio:.3f}")


if __name__ == "__main__":
    main()
