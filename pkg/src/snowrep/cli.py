"""Command-line front end: classify, simulate, equilibria, basins, separatrix, sweep.

Shared flags: --payoffs T,R,S,P --m N --seed N --out PATH --dt --t-max
--eps-conv.  Values may also come from a JSON config file (--config); CLI
flags override file values.  Payoffs and grid values are parsed as exact
rationals ("6", "2.9" and "11/5" all work).

Exit codes: 0 ok, 2 validation error, 3 unresolved convergence, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .game_core import RepeatedGameSpec, SnowdriftViolation, as_fraction
from .dynamics import CONVERGED, IntegratorConfig, integrate
from .game_core import build_repeated_matrix
from .convergence import (
    BisectionError,
    basin_sample,
    match_catalog,
    label_consistent,
    predict_limit,
    separatrix_bisect,
    separatrix_sweep,
)
from .equilibria import equilibrium_catalog
from .metrics import sweep_R, sweep_csv
from .reports import (
    basin_report,
    catalog_report,
    classify_report,
    separatrix_csv,
    trajectory_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_UNRESOLVED = 3
EXIT_INTERNAL = 4


def _parse_payoffs(text: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"--payoffs needs 4 comma-separated values, got {text!r}")
    return parts


def _parse_point(text: str):
    parts = [Fraction(p.strip()) for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected 4 comma-separated shares, got {text!r}")
    return np.array([float(v) for v in parts])


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; flags override its values")
    shared.add_argument("--payoffs", help="T,R,S,P as rationals, e.g. 6,4,3,2")
    shared.add_argument("--m", type=int, help="number of rounds (>= 2)")
    shared.add_argument("--seed", type=int, help="RNG seed for sampled commands")
    shared.add_argument("--out", help="output path (CSV or JSON per command)")
    shared.add_argument("--dt", type=float, help="integrator step size")
    shared.add_argument("--t-max", dest="t_max", type=float, help="integration horizon")
    shared.add_argument("--eps-conv", dest="eps_conv", type=float,
                        help="RHS max-norm convergence threshold")
    shared.add_argument("--sample-every", dest="sample_every", type=int,
                        help="steps between recorded trajectory samples")

    parser = argparse.ArgumentParser(
        prog="snowrep",
        description="Replicator dynamics of the repeated snowdrift game "
                    "(ALLC, TFT, STFT, ALLD)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[shared],
                   help="payoff regime, sign structure, ratio constants")

    p_sim = sub.add_parser("simulate", parents=[shared],
                           help="integrate one trajectory, write CSV + summary")
    p_sim.add_argument("--x0", help="initial shares, e.g. 0.4,0.2,0.1,0.3")
    p_sim.add_argument("--summary", help="summary JSON path (default: stdout)")

    sub.add_parser("equilibria", parents=[shared],
                   help="equilibrium catalog with exact coordinates")

    p_bas = sub.add_parser("basins", parents=[shared],
                           help="Monte-Carlo basin statistics")
    p_bas.add_argument("--samples", type=int, help="number of random starts")
    p_bas.add_argument("--records", action="store_true",
                       help="include per-run records in the report")

    p_sep = sub.add_parser("separatrix", parents=[shared],
                           help="stable-manifold samples by segment bisection")
    p_sep.add_argument("--samples", type=int, help="number of manifold samples")
    p_sep.add_argument("--iters", type=int, help="bisection iterations per sample")
    p_sep.add_argument("--seed-a", dest="seed_a", help="explicit first seed point")
    p_sep.add_argument("--seed-b", dest="seed_b", help="explicit second seed point")

    p_swp = sub.add_parser("sweep", parents=[shared],
                           help="per-equilibrium payoff/cooperation over an R grid")
    p_swp.add_argument("--r-min", dest="r_min", help="grid start (rational)")
    p_swp.add_argument("--r-max", dest="r_max", help="grid end, inclusive (rational)")
    p_swp.add_argument("--r-step", dest="r_step", help="grid step (rational)")

    return parser


_DEFAULTS = {
    "seed": 0,
    "dt": 0.01,
    "t_max": 1e4,
    "eps_conv": 1e-10,
    "sample_every": 10,
    "samples": 100,
    "iters": 60,
    "records": False,
}


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, overlaid by the config file, overlaid by explicit CLI flags."""
    config = dict(_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            config.update(json.load(fh))
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        if key == "records":
            if value:
                config[key] = True
            continue
        config[key] = value
    return config


def _spec_from(config: dict) -> RepeatedGameSpec:
    if "payoffs" not in config or "m" not in config:
        raise ValueError("both --payoffs and --m are required")
    payoffs = config["payoffs"]
    if isinstance(payoffs, str):
        payoffs = _parse_payoffs(payoffs)
    T, R, S, P = payoffs
    return RepeatedGameSpec.of(T, R, S, P, int(config["m"]))


def _integrator_from(config: dict) -> IntegratorConfig:
    return IntegratorConfig(
        dt=float(config["dt"]),
        t_max=float(config["t_max"]),
        eps_conv=float(config["eps_conv"]),
        sample_every=int(config["sample_every"]),
    )


def _resolved_for_summary(config: dict) -> dict:
    out = {}
    for key, value in sorted(config.items()):
        out[key] = value if isinstance(value, (int, float, bool, str, list)) else str(value)
    return out


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_classify(config: dict) -> int:
    spec = _spec_from(config)
    doc = classify_report(spec)
    _write_or_print(json.dumps(doc, indent=2, sort_keys=True) + "\n", config.get("out"))
    return EXIT_OK


def cmd_simulate(config: dict) -> int:
    spec = _spec_from(config)
    if "x0" not in config:
        raise ValueError("simulate requires --x0")
    x0 = config["x0"]
    if isinstance(x0, str):
        x0 = _parse_point(x0)
    else:
        x0 = np.asarray(x0, dtype=float)
    cfg = _integrator_from(config)
    traj = integrate(x0, build_repeated_matrix(spec), cfg)

    csv_text = trajectory_csv(traj, spec)
    out = config.get("out")
    if out:
        Path(out).write_text(csv_text)

    catalog = equilibrium_catalog(spec)
    match = match_catalog(traj.x_end, catalog)
    prediction = predict_limit(x0, spec)
    summary = {
        "config": _resolved_for_summary(config),
        "status": traj.status,
        "t_end": repr(traj.t_end),
        "terminal": [repr(float(v)) for v in traj.x_end],
        "matched_label": None if match is None else match.label,
        "matched_param": None if match is None or match.param is None else repr(match.param),
        "predicted": list(prediction.candidates),
        "deterministic": prediction.deterministic,
        "consistent": match is not None and label_consistent(match, prediction),
    }
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    _write_or_print(text, config.get("summary"))
    return EXIT_OK if traj.status == CONVERGED else EXIT_UNRESOLVED


def cmd_equilibria(config: dict) -> int:
    spec = _spec_from(config)
    doc = catalog_report(spec)
    _write_or_print(json.dumps(doc, indent=2, sort_keys=True) + "\n", config.get("out"))
    return EXIT_OK


def cmd_basins(config: dict) -> int:
    spec = _spec_from(config)
    cfg = _integrator_from(config)
    stats = basin_sample(spec, int(config["samples"]), cfg, seed=int(config["seed"]))
    doc = basin_report(stats, include_records=bool(config.get("records")))
    doc["config"] = _resolved_for_summary(config)
    _write_or_print(json.dumps(doc, indent=2, sort_keys=True) + "\n", config.get("out"))
    return EXIT_OK if stats.unresolved == 0 else EXIT_UNRESOLVED


def cmd_separatrix(config: dict) -> int:
    spec = _spec_from(config)
    cfg = _integrator_from(config)
    iters = int(config["iters"])
    if config.get("seed_a") and config.get("seed_b"):
        a = _parse_point(config["seed_a"])
        b = _parse_point(config["seed_b"])
        samples = [separatrix_bisect(a, b, spec, cfg, iters)]
    else:
        samples = separatrix_sweep(
            spec, int(config["samples"]), cfg, iters, seed=int(config["seed"])
        )
    _write_or_print(separatrix_csv(samples), config.get("out"))
    return EXIT_OK


def cmd_sweep(config: dict) -> int:
    spec = _spec_from(config)  # R from --payoffs is replaced by the grid
    for key in ("r_min", "r_max", "r_step"):
        if key not in config:
            raise ValueError("sweep requires --r-min, --r-max and --r-step")
    lo, hi = as_fraction(config["r_min"]), as_fraction(config["r_max"])
    step = as_fraction(config["r_step"])
    if step <= 0 or hi < lo:
        raise ValueError("sweep grid must have positive step and r_max >= r_min")
    grid = []
    R = lo
    while R <= hi:
        grid.append(R)
        R += step
    rows = sweep_R(spec.payoffs.T, spec.payoffs.S, spec.payoffs.P, spec.m, grid)
    _write_or_print(sweep_csv(rows), config.get("out"))
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "basins": cmd_basins,
    "separatrix": cmd_separatrix,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](config)
    except (SnowdriftViolation, BisectionError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as err:  # pragma: no cover - defensive
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
