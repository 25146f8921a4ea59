"""Command line interface: ``fracinv {mlf,forward,observe,estimate,experiment}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from fracinv import __version__
from fracinv.config import (
    apply_overrides,
    experiment_from_dict,
    load_config,
    noise_from_dict,
    problem_from_dict,
    source_from_dict,
)
from fracinv.errors import ConfigError, NumericalError
from fracinv.estimator import choose_M, estimate
from fracinv.experiment import result_to_csv, run_experiment
from fracinv.forward import evaluate_uT
from fracinv.mittag_leffler import MlfQuery, mlf
from fracinv.observation import observe, read_observations_csv, write_observations_csv

logger = logging.getLogger("fracinv")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(header, rows, metadata: dict | None = None) -> str:
    buf = io.StringIO()
    for key, val in (metadata or {}).items():
        buf.write(f"# {key}={val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, (int, np.integer)) else f"{v:.17g}" for v in row])
    return buf.getvalue()


def _config(args) -> dict:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    return load_config(args.config)


def cmd_mlf(args) -> int:
    try:
        q = MlfQuery(args.alpha, args.beta, args.z)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"{mlf(q):.15g}")
    return 0


def cmd_forward(args) -> int:
    raw = apply_overrides(_config(args), out=args.out)
    spec = problem_from_dict(raw.get("problem") or {})
    f = source_from_dict(raw.get("source"))
    points = int(args.points or raw.get("points", 101))
    x = np.linspace(0.0, np.pi, points)
    u = evaluate_uT(spec, f, x)
    meta = {"version": __version__, "alpha": spec.alpha, "T": spec.T, "R": spec.label}
    _emit(_table(["x", "uT"], zip(x, u), meta), raw.get("out"))
    return 0


def cmd_observe(args) -> int:
    raw = apply_overrides(_config(args), seed=args.seed, out=args.out, n=args.n)
    spec = problem_from_dict(raw.get("problem") or {})
    f = source_from_dict(raw.get("source"))
    if "n" not in raw:
        raise ConfigError("observe needs 'n' (config key or --n)")
    noise = noise_from_dict(raw.get("noise"), int(raw.get("seed", 0)))
    try:
        obs = observe(spec, f, int(raw["n"]), noise)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    meta = {"version": __version__, "v_max": noise.v_max, "sigma_mode": noise.sigma_mode}
    out = raw.get("out")
    if out is None:
        raise ConfigError("observe needs an output path (--out or config 'out')")
    write_observations_csv(obs, out, metadata=meta)
    return 0


def cmd_estimate(args) -> int:
    raw = apply_overrides(_config(args), out=args.out)
    if args.paper_literal:
        raw["mode"] = "paper-literal"
    spec = problem_from_dict(raw.get("problem") or {})
    try:
        obs = read_observations_csv(args.obs)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read observations {args.obs}: {exc}") from exc
    M = args.M if args.M is not None else raw.get("M")
    if M is None:
        M = choose_M(obs.n, float(raw.get("beta", 2.0)))
    try:
        est = estimate(obs, spec, int(M), mode=str(raw.get("mode", "consistent")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    meta = {"version": __version__, "n": obs.n, "M": est.M, "mode": est.mode, "seed": obs.seed}
    _emit(_table(["p", "c_tilde"], enumerate(est.coeffs), meta), raw.get("out"))
    if args.dense:
        x = np.linspace(0.0, np.pi, args.dense_points)
        Path(args.dense).write_text(_table(["x", "f_tilde"], zip(x, est(x)), meta))
    return 0


def cmd_experiment(args) -> int:
    raw = apply_overrides(
        _config(args), seed=args.seed, out=args.out, replicates=args.replicates, workers=args.workers
    )
    if args.paper_literal:
        raw["mode"] = "paper-literal"
    cfg = experiment_from_dict(raw)
    result = run_experiment(cfg)
    _emit(result_to_csv(result), cfg.out)
    if result.slope is not None:
        logger.info("fitted log-log slope %.4f", result.slope)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracinv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mlf", help="evaluate E_{alpha,beta}(z) for z <= 0")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--z", type=float, required=True)
    p.set_defaults(func=cmd_mlf)

    def common(p, seed=False):
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--out", metavar="PATH")
        if seed:
            p.add_argument("--seed", type=int, metavar="U64")

    p = sub.add_parser("forward", help="sample u(x, T) on a uniform grid")
    common(p)
    p.add_argument("--points", type=int)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("observe", help="draw noisy samples on the midpoint grid")
    common(p, seed=True)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_observe)

    p = sub.add_parser("estimate", help="reconstruct source coefficients from observations")
    common(p)
    p.add_argument("--obs", required=True, metavar="CSV")
    p.add_argument("--M", type=int)
    p.add_argument("--paper-literal", action="store_true")
    p.add_argument("--dense", metavar="PATH", help="also write samples of the estimate")
    p.add_argument("--dense-points", type=int, default=201)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="Monte Carlo risk study over n_list")
    common(p, seed=True)
    p.add_argument("--paper-literal", action="store_true")
    p.add_argument("--replicates", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
