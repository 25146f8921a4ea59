"""Run the convergence-rate study and print the risk table with the fitted slope.

    python3 scripts/run_rate_study.py [configs/rate_study.yaml] [--replicates N]
"""

import argparse
from pathlib import Path

from fracinv.config import apply_overrides, experiment_from_dict, load_config
from fracinv.experiment import result_to_csv, run_experiment

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default=ROOT / "configs" / "rate_study.yaml")
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    raw = apply_overrides(load_config(args.config), replicates=args.replicates, seed=args.seed)
    cfg = experiment_from_dict(raw)
    res = run_experiment(cfg)

    print(f"{'n':>6} {'M':>3} {'risk':>11} {'stderr':>10} {'I1':>10} {'I2':>10} {'I3':>10} {'bound':>10}")
    for r in res.rows:
        print(f"{r.n:6d} {r.M:3d} {r.risk:11.4e} {r.stderr:10.2e} {r.I1:10.2e} {r.I2:10.2e} {r.I3:10.2e} {r.bound:10.3e}")
    target = -2 * cfg.beta / (5 + 2 * cfg.beta)
    if res.slope is not None:
        print(f"fitted slope {res.slope:.4f}   predicted {target:.4f}")

    if cfg.out:
        out = ROOT / cfg.out if not Path(cfg.out).is_absolute() else Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(result_to_csv(res))
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
