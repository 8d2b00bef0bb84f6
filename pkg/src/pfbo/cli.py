"""Command-line interface.

Subcommands:

* ``simulate``   -- generate a synthetic observation series CSV
* ``loglik``     -- particle-filter (or exact) log-likelihood at a theta
* ``optimize``   -- one surrogate-optimization run, optional trace CSV
* ``experiment`` -- the full replicated grid, exported as CSV tables
* ``report``     -- render figures from an exported results directory

Exit codes: 0 on success, 2 on usage or validation errors, 1 on
runtime failures.  Commands that write outputs also write a JSON
manifest; long-running ones write it before computing and finalize it
afterwards, so an interrupted run leaves a ``status: running`` marker.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bench import (
    ConfigError,
    _fmt,
    _write_atomic,
    config_from_dict,
    config_to_dict,
    desk_profile_dict,
    export_tables,
    full_profile_dict,
    run_experiment,
)
from .bo import BOConfig, BOTrace, bo_run
from .gp import GPHyperParams
from .kalman import kalman_loglik
from .pfilter import PFConfig, pf_loglik, pf_objective
from .ssm import (
    STREAM_EXPERIMENT,
    LinearGaussianModel,
    derive_seed,
    load_series,
    save_series,
    simulate,
)

__all__ = ["main", "build_parser"]

TRACE_HEADER = "t,x_evaluated,raw_value,std_value,kappa,incumbent_x,incumbent_mean"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _write_manifest(path: Path, payload: dict) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _model_from_args(args: argparse.Namespace, tau2: float) -> LinearGaussianModel:
    return LinearGaussianModel(tau2=tau2, obs_var=args.obs_var,
                               init_mean=args.init_mean, init_var=args.init_var)


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--obs-var", type=float, default=1.043,
                   help="observation noise variance (default 1.043)")
    p.add_argument("--init-mean", type=float, default=0.0,
                   help="initial state mean (default 0)")
    p.add_argument("--init-var", type=float, default=4.0,
                   help="initial state variance (default 4)")


def write_trace_csv(path: Path, trace: BOTrace) -> None:
    """Evaluation-by-evaluation record of one optimization run."""
    lines = [TRACE_HEADER]
    for rec in trace.records:
        lines.append(
            f"{rec.t},{_fmt(rec.x_evaluated)},{_fmt(rec.raw_value)},"
            f"{_fmt(rec.std_value)},{_fmt(rec.kappa_t)},"
            f"{_fmt(rec.incumbent_x)},{_fmt(rec.incumbent_mean)}"
        )
    _write_atomic(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Subcommand handlers

def _cmd_simulate(args: argparse.Namespace) -> int:
    model = _model_from_args(args, tau2=args.tau2)
    series = simulate(model, args.length, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_series(series, out)
    _write_manifest(_manifest_path(out), {
        "command": "simulate",
        "version": __version__,
        "status": "complete",
        "finished_at": _now(),
        "params": {"tau2": args.tau2, "obs_var": args.obs_var,
                   "init_mean": args.init_mean, "init_var": args.init_var,
                   "length": args.length, "seed": args.seed},
        "outputs": [out.name],
    })
    print(f"wrote {out} ({len(series.values)} observations)")
    return 0


def _cmd_loglik(args: argparse.Namespace) -> int:
    series = load_series(args.series)
    model = _model_from_args(args, tau2=args.theta)
    values = []
    if args.exact:
        values.append(kalman_loglik(args.theta, series, model))
    else:
        for r in range(args.reps):
            cfg = PFConfig(m=args.m, ess_threshold_fraction=args.ess_frac,
                           seed=derive_seed(args.seed, STREAM_EXPERIMENT, r))
            values.append(pf_loglik(args.theta, series, model, cfg).loglik)
    for v in values:
        print(_fmt(v))
    if args.manifest:
        _write_manifest(Path(args.manifest), {
            "command": "loglik",
            "version": __version__,
            "status": "complete",
            "finished_at": _now(),
            "params": {"series": str(args.series), "theta": args.theta,
                       "m": args.m, "reps": args.reps, "seed": args.seed,
                       "ess_frac": args.ess_frac, "exact": args.exact},
            "values": values,
        })
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    series = load_series(args.series)
    model = _model_from_args(args, tau2=args.bounds[0])
    config = BOConfig(
        bounds=(args.bounds[0], args.bounds[1]),
        hp=GPHyperParams(args.sigma_f, args.length_scale, args.sigma_n),
        max_iters=args.iters,
        seed=args.seed,
        delta=args.delta,
        init_points=tuple(args.init_points) if args.init_points else None,
        eps_x=args.eps_x,
        eps_f=args.eps_f,
        patience=args.patience,
        acq_grid_size=args.acq_grid,
        brent_tol=args.brent_tol,
        normalizer_reps=args.normalizer_reps,
        stop_on_convergence=args.stop_on_convergence,
    )
    if args.oracle:
        def objective(theta: float, rng) -> float:
            return kalman_loglik(theta, series, model)
    else:
        objective = pf_objective(series, model, args.m, args.ess_frac)

    trace_out = Path(args.trace_out) if args.trace_out else None
    manifest = None
    if trace_out is not None:
        trace_out.parent.mkdir(parents=True, exist_ok=True)
        manifest = {
            "command": "optimize",
            "version": __version__,
            "status": "running",
            "started_at": _now(),
            "params": {"series": str(args.series), "m": args.m,
                       "oracle": args.oracle, "sigma_f": args.sigma_f,
                       "sigma_n": args.sigma_n, "length_scale": args.length_scale,
                       "iters": args.iters, "seed": args.seed,
                       "bounds": list(args.bounds)},
            "outputs": [trace_out.name],
        }
        _write_manifest(_manifest_path(trace_out), manifest)

    trace = bo_run(objective, config)
    theta_hat = trace.records[-1].incumbent_x
    kf_at_hat = kalman_loglik(theta_hat, series, model)
    if trace_out is not None:
        write_trace_csv(trace_out, trace)
        manifest.update(status="complete", finished_at=_now(),
                        theta_hat=theta_hat, kf_loglik_at_theta_hat=kf_at_hat,
                        converged_at=trace.converged_at)
        _write_manifest(_manifest_path(trace_out), manifest)
    print(f"theta_hat={_fmt(theta_hat)}")
    print(f"kf_loglik_at_theta_hat={_fmt(kf_at_hat)}")
    if trace.converged_at is not None:
        print(f"converged_at={trace.converged_at}")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(message)s")
    profile = desk_profile_dict() if args.profile == "desk" else full_profile_dict()
    if args.config:
        try:
            override = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ValueError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {args.config}: {exc}") from None
        profile = _deep_merge(profile, override)
    if args.out is not None:
        profile["output_dir"] = args.out
    if args.seed is not None:
        profile["master_seed"] = args.seed
    cfg = config_from_dict(profile)

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    _write_manifest(out / "manifest.json", {
        "command": "experiment",
        "version": __version__,
        "status": "running",
        "started_at": started,
        "config": config_to_dict(cfg),
        "master_seed": cfg.master_seed,
    })
    result = run_experiment(cfg, with_stats=not args.no_stats)
    export_tables(result, out)
    final = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    final.update(command="experiment", status="complete",
                 started_at=started, finished_at=_now())
    _write_manifest(out / "manifest.json", final)
    print(f"wrote results to {out}")
    if args.report:
        from .plots import render_report
        for path in render_report(out):
            print(f"wrote {path}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from .plots import render_report

    results = Path(args.results)
    if not results.is_dir():
        raise ValueError(f"results directory not found: {results}")
    written = render_report(results, args.out)
    if not written:
        print("no renderable CSVs found", file=sys.stderr)
        return 0
    for path in written:
        print(f"wrote {path}")
    return 0


def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


# ---------------------------------------------------------------------------
# Parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfbo",
        description="Noisy log-likelihood maximization for state-space models "
                    "via particle filtering and GP surrogate optimization.",
    )
    parser.add_argument("--version", action="version", version=f"pfbo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic observation series")
    p.add_argument("--tau2", type=float, default=0.012,
                   help="system noise variance used to generate the data")
    _add_model_args(p)
    p.add_argument("--length", type=int, default=500)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("loglik", help="log-likelihood at a given parameter value")
    p.add_argument("--series", required=True, help="observation CSV")
    p.add_argument("--theta", type=float, required=True,
                   help="system noise variance to evaluate")
    _add_model_args(p)
    p.add_argument("--m", type=int, default=1000, help="particle count")
    p.add_argument("--reps", type=int, default=1, help="independent estimates to print")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ess-frac", type=float, default=0.5,
                   help="resample when ESS < this fraction of m")
    p.add_argument("--exact", action="store_true",
                   help="exact Kalman value instead of the particle estimate")
    p.add_argument("--manifest", default=None, help="optional manifest JSON path")
    p.set_defaults(handler=_cmd_loglik)

    p = sub.add_parser("optimize", help="maximize the estimated log-likelihood")
    p.add_argument("--series", required=True, help="observation CSV")
    _add_model_args(p)
    p.add_argument("--m", type=int, default=1000, help="particle count")
    p.add_argument("--ess-frac", type=float, default=0.5)
    p.add_argument("--oracle", action="store_true",
                   help="optimize the exact Kalman log-likelihood (no noise)")
    p.add_argument("--sigma-f", type=float, default=1.0, help="GP signal sd")
    p.add_argument("--sigma-n", type=float, default=0.3, help="GP noise sd")
    p.add_argument("--length-scale", type=float, default=0.2,
                   help="GP length scale on the normalized [0,1] domain")
    p.add_argument("--iters", type=int, default=30, help="acquisition iterations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bounds", type=float, nargs=2, default=(0.005, 0.025),
                   metavar=("LO", "HI"), help="search interval for theta")
    p.add_argument("--delta", type=float, default=0.1,
                   help="confidence parameter of the acquisition schedule")
    p.add_argument("--eps-x", type=float, default=0.01)
    p.add_argument("--eps-f", type=float, default=0.1)
    p.add_argument("--patience", type=int, default=3)
    p.add_argument("--acq-grid", type=int, default=201)
    p.add_argument("--brent-tol", type=float, default=1e-6)
    p.add_argument("--normalizer-reps", type=int, default=5)
    p.add_argument("--init-points", type=float, nargs="+", default=None,
                   help="initial design in theta units (default: 5 equispaced)")
    p.add_argument("--stop-on-convergence", action="store_true",
                   help="stop early once the convergence rule fires")
    p.add_argument("--trace-out", default=None, help="write per-evaluation trace CSV")
    p.set_defaults(handler=_cmd_optimize)

    p = sub.add_parser("experiment", help="replicated benchmark grid, exported to CSV")
    p.add_argument("--profile", choices=("desk", "full"), default="desk",
                   help="base configuration (desk: minutes; full: the complete grid, hours)")
    p.add_argument("--config", default=None,
                   help="JSON file with overrides for the chosen profile")
    p.add_argument("--out", default=None, help="output directory (overrides config)")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (overrides config)")
    p.add_argument("--no-stats", action="store_true",
                   help="skip the per-m log-likelihood statistics pass")
    p.add_argument("--report", action="store_true",
                   help="also render figures after exporting")
    p.add_argument("--verbose", action="store_true", help="log progress")
    p.set_defaults(handler=_cmd_experiment)

    p = sub.add_parser("report", help="render figures from an exported results dir")
    p.add_argument("--results", default=".", help="directory with exported CSVs")
    p.add_argument("--out", default=None, help="directory for figures (default: results)")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        raise
    except Exception as exc:  # runtime failures: I/O, degeneracy, linalg
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
