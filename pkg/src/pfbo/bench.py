"""Monte Carlo experiment harness.

Reproduces the evaluation protocol end to end: per-particle-count
log-likelihood statistics against the exact Kalman values, repeated
optimization runs over a grid of GP hyperparameters, and the derived
mean-squared-error curves

    MSE(x_i)   = E[(theta_hat_i - theta_star)^2]
    MSE(ell_i) = E[(ell_KF(theta_hat_i) - ell_KF(theta_star))^2]

where theta_star is the exact MLE of the realized series and ell_KF the
noise-free Kalman log-likelihood.  Results are written as UTF-8 CSV
files (LF line endings, 17-significant-digit floats) plus a manifest
JSON sufficient to reproduce the run.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bo import BOConfig, BOTrace, Normalizer, build_normalizer, bo_run
from .gp import GPHyperParams
from .kalman import kalman_loglik, kalman_mle
from .pfilter import PFConfig, pf_loglik, pf_objective
from .ssm import (
    STREAM_EXPERIMENT,
    LinearGaussianModel,
    TimeSeries,
    derive_seed,
    load_series,
    simulate,
)

__all__ = [
    "SeriesSource",
    "BOTemplate",
    "ExperimentConfig",
    "LogLikStats",
    "MSECurves",
    "CellResult",
    "ExperimentResult",
    "ConfigError",
    "loglik_stats",
    "run_experiment",
    "export_tables",
    "read_mse_curves",
    "config_from_dict",
    "config_to_dict",
    "desk_profile_dict",
    "full_profile_dict",
    "EXPORT_FILES",
]

log = logging.getLogger(__name__)

# Sub-namespaces under the experiment seed stream.
_SEED_STATS = 0
_SEED_NORMALIZER = 1
_SEED_BO = 2

EXPORT_FILES = (
    "table1.csv",
    "table2.csv",
    "mse_curves.csv",
    "posterior_snapshots.csv",
    "convergence_increments.csv",
    "traces.csv",
)

# Table-2 band thresholds relative to the per-block minimum of log10 MSE.
_BAND_NEAR = 0.30
_BAND_FAR = 1.0


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the field path."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Configuration

@dataclass(frozen=True)
class SeriesSource:
    """Where the observation series comes from.

    kind "simulate" draws from the linear Gaussian model; kind "file"
    loads a single-column CSV.  The model parameters are used by the
    filters in both cases (tau2 is only the data-generating value).
    """

    kind: str
    model: LinearGaussianModel
    length: int = 500
    seed: int = 1
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("simulate", "file"):
            raise ConfigError(f"series.source: must be 'simulate' or 'file', got {self.kind!r}")
        if self.kind == "simulate" and self.length < 1:
            raise ConfigError(f"series.length: must be >= 1, got {self.length}")
        if self.kind == "file" and not self.path:
            raise ConfigError("series.path: required when source is 'file'")

    def realize(self) -> TimeSeries:
        if self.kind == "simulate":
            return simulate(self.model, self.length, self.seed)
        return load_series(self.path)


@dataclass(frozen=True)
class BOTemplate:
    """Per-run optimization settings shared by every grid cell."""

    bounds: tuple[float, float]
    delta: float = 0.1
    eps_x: float = 0.01
    eps_f: float = 0.1
    patience: int = 3
    acq_grid_size: int = 201
    brent_tol: float = 1e-6
    normalizer_reps: int = 5
    init_points: tuple[float, ...] | None = None
    snapshot_iters: tuple[int, ...] = ()
    snapshot_grid_size: int = 201

    def build(self, hp: GPHyperParams, max_iters: int, seed: int,
              snapshots: bool) -> BOConfig:
        return BOConfig(
            bounds=self.bounds,
            hp=hp,
            max_iters=max_iters,
            seed=seed,
            delta=self.delta,
            init_points=self.init_points,
            eps_x=self.eps_x,
            eps_f=self.eps_f,
            patience=self.patience,
            acq_grid_size=self.acq_grid_size,
            brent_tol=self.brent_tol,
            normalizer_reps=self.normalizer_reps,
            snapshot_iters=self.snapshot_iters if snapshots else (),
            snapshot_grid_size=self.snapshot_grid_size,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    series: SeriesSource
    particle_counts: tuple[int, ...]
    sigma_n_grid: tuple[float, ...]
    length_scale_grid: tuple[float, ...]
    repetitions: int
    iterations: int
    bo: BOTemplate
    theta_probes: tuple[float, ...]
    master_seed: int
    output_dir: str
    sigma_f: float = 1.0
    ess_threshold_fraction: float = 0.5
    table_iters: tuple[int, ...] = (10,)

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError(f"repetitions: must be >= 1, got {self.repetitions}")
        if self.iterations < 1:
            raise ConfigError(f"iterations: must be >= 1, got {self.iterations}")
        for name in ("particle_counts", "sigma_n_grid", "length_scale_grid", "theta_probes"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"{name}: must be non-empty")
        if any(m < 1 for m in self.particle_counts):
            raise ConfigError("particle_counts: entries must be >= 1")


# ---------------------------------------------------------------------------
# Log-likelihood statistics (Table-1 analogue)

@dataclass(frozen=True)
class LogLikStats:
    """Sample statistics of the PF log-likelihood per (m, theta probe)."""

    m_values: tuple[int, ...]
    theta_probes: tuple[float, ...]
    mean: np.ndarray  # [n_m, n_probes]
    var: np.ndarray
    sd: np.ndarray
    kalman: np.ndarray  # [n_probes]
    repetitions: int


def loglik_stats(
    series: TimeSeries,
    model_base: LinearGaussianModel,
    m_list: tuple[int, ...],
    theta_probes: tuple[float, ...],
    repetitions: int,
    seed: int,
    ess_threshold_fraction: float = 0.5,
    seed_for=None,
) -> LogLikStats:
    """Replicated PF log-likelihood statistics plus the Kalman reference.

    ``seed_for(m_index, probe_index, rep)`` overrides per-run seeds;
    by default they are derived from ``seed`` with disjoint streams.
    """
    if repetitions < 2:
        raise ValueError(f"repetitions must be >= 2, got {repetitions}")
    if seed_for is None:
        def seed_for(mi: int, pi: int, r: int) -> int:
            return derive_seed(seed, STREAM_EXPERIMENT, _SEED_STATS, mi, pi, r)
    n_m, n_p = len(m_list), len(theta_probes)
    values = np.empty((n_m, n_p, repetitions))
    for mi, m in enumerate(m_list):
        for pi, theta in enumerate(theta_probes):
            for r in range(repetitions):
                cfg = PFConfig(m=m, ess_threshold_fraction=ess_threshold_fraction,
                               seed=seed_for(mi, pi, r))
                try:
                    values[mi, pi, r] = pf_loglik(theta, series, model_base, cfg).loglik
                except Exception as exc:
                    raise RuntimeError(
                        f"particle filter failed at m={m}, theta={theta}, replicate {r}"
                    ) from exc
        log.info("loglik_stats: m=%d done", m)
    var = values.var(axis=2, ddof=1)
    return LogLikStats(
        m_values=tuple(m_list),
        theta_probes=tuple(theta_probes),
        mean=values.mean(axis=2),
        var=var,
        sd=np.sqrt(var),
        kalman=np.array([kalman_loglik(th, series, model_base) for th in theta_probes]),
        repetitions=repetitions,
    )


# ---------------------------------------------------------------------------
# The optimization experiment

@dataclass(frozen=True)
class MSECurves:
    """MSE of incumbent location and value per cell and iteration."""

    budget: int
    mse_x: dict[tuple[int, float, float], np.ndarray]
    mse_f: dict[tuple[int, float, float], np.ndarray]


@dataclass
class CellResult:
    """All replicates of one (m, sigma_n, length_scale) cell."""

    m: int
    sigma_n: float
    length_scale: float
    traces: list[BOTrace]
    incumbents_x: np.ndarray  # [R, budget+1], parameter units
    incumbents_mean: np.ndarray  # [R, budget+1], standardized
    incumbents_kf: np.ndarray  # [R, budget+1], exact log-likelihood
    mse_x: np.ndarray  # [budget+1]
    mse_f: np.ndarray

    @property
    def key(self) -> tuple[int, float, float]:
        return (self.m, self.sigma_n, self.length_scale)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    series: TimeSeries
    theta_star: float
    loglik_star: float
    stats: LogLikStats | None
    cells: list[CellResult]

    def curves(self) -> MSECurves:
        return MSECurves(
            budget=self.config.iterations,
            mse_x={c.key: c.mse_x for c in self.cells},
            mse_f={c.key: c.mse_f for c in self.cells},
        )


def mse_from_incumbents(
    incumbents_x: np.ndarray,
    incumbents_kf: np.ndarray,
    theta_star: float,
    loglik_star: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Seed-averaged squared errors of incumbent location and value."""
    mse_x = np.mean((incumbents_x - theta_star) ** 2, axis=0)
    mse_f = np.mean((incumbents_kf - loglik_star) ** 2, axis=0)
    return mse_x, mse_f


def run_experiment(cfg: ExperimentConfig, with_stats: bool = True) -> ExperimentResult:
    """Run the full grid of optimization replicates.

    theta_star is computed once from the realized series via the exact
    Kalman MLE.  Every replicate's seed derives from the master seed
    and (particle-count index, replicate index) only, so raw initial
    evaluations are identical across GP hyperparameter cells.
    """
    series = cfg.series.realize()
    model = cfg.series.model
    mle = kalman_mle(series, cfg.bo.bounds, model)
    log.info("exact MLE: theta*=%.6g, loglik*=%.6f", mle.theta_star, mle.loglik_star)

    stats = None
    if with_stats:
        stats = loglik_stats(
            series, model, cfg.particle_counts, cfg.theta_probes,
            cfg.repetitions, cfg.master_seed, cfg.ess_threshold_fraction,
        )

    budget = cfg.iterations
    cells: list[CellResult] = []
    normalizers: dict[int, Normalizer] = {}
    for mi, m in enumerate(cfg.particle_counts):
        objective = pf_objective(series, model, m, cfg.ess_threshold_fraction)
        probe_points = cfg.bo.init_points or tuple(
            float(x) for x in np.linspace(*cfg.bo.bounds, 5)
        )
        normalizers[mi] = build_normalizer(
            objective, probe_points, cfg.bo.normalizer_reps,
            derive_seed(cfg.master_seed, STREAM_EXPERIMENT, _SEED_NORMALIZER, mi),
        )
        for sigma_n in cfg.sigma_n_grid:
            for length_scale in cfg.length_scale_grid:
                hp = GPHyperParams(cfg.sigma_f, length_scale, sigma_n)
                traces = []
                inc_x = np.empty((cfg.repetitions, budget + 1))
                inc_mean = np.empty((cfg.repetitions, budget + 1))
                inc_kf = np.empty((cfg.repetitions, budget + 1))
                for r in range(cfg.repetitions):
                    bo_cfg = cfg.bo.build(
                        hp, budget,
                        seed=derive_seed(cfg.master_seed, STREAM_EXPERIMENT, _SEED_BO, mi, r),
                        snapshots=(r == 0),
                    )
                    try:
                        trace = bo_run(objective, bo_cfg, normalizer=normalizers[mi])
                    except Exception as exc:
                        raise RuntimeError(
                            f"optimization failed in cell m={m}, sigma_n={sigma_n}, "
                            f"length_scale={length_scale}, replicate {r}"
                        ) from exc
                    series_inc = trace.incumbent_series()
                    for t, x, mean in series_inc:
                        inc_x[r, t] = x
                        inc_mean[r, t] = mean
                        inc_kf[r, t] = kalman_loglik(x, series, model)
                    traces.append(trace)
                mse_x, mse_f = mse_from_incumbents(inc_x, inc_kf, mle.theta_star, mle.loglik_star)
                cells.append(CellResult(m, sigma_n, length_scale, traces,
                                        inc_x, inc_mean, inc_kf, mse_x, mse_f))
                log.info("cell m=%d sigma_n=%g ell=%g done (final MSE(x)=%.3g)",
                         m, sigma_n, length_scale, mse_x[-1])
    return ExperimentResult(cfg, series, mle.theta_star, mle.loglik_star, stats, cells)


# ---------------------------------------------------------------------------
# Exports

def _safe_log10(v: float) -> float:
    return math.log10(v) if v > 0.0 else float("-inf")


def _table1_text(result: ExperimentResult) -> str:
    stats = result.stats
    if stats is None:
        return "m,statistic\n"
    header = "m,statistic," + ",".join(format(p, "g") for p in stats.theta_probes)
    lines = [header]
    for mi, m in enumerate(stats.m_values):
        for name, arr in (("mean", stats.mean), ("var", stats.var), ("sd", stats.sd)):
            lines.append(f"{m},{name}," + ",".join(_fmt(v) for v in arr[mi]))
    lines.append("kalman,loglik," + ",".join(_fmt(v) for v in stats.kalman))
    return "\n".join(lines) + "\n"


def _band(value: float, block_min: float) -> str:
    if value == block_min:
        return "min"
    if value <= block_min + _BAND_NEAR:
        return "within_0.30"
    if value > block_min + _BAND_FAR:
        return "above_1.0"
    return ""


def _table2_text(result: ExperimentResult) -> str:
    header = "iter,m,sigma_n,length_scale,log10_mse_x,band_x,log10_mse_f,band_f"
    lines = [header]
    cfg = result.config
    iters = sorted({i for i in (*cfg.table_iters, cfg.iterations) if 0 <= i <= cfg.iterations})
    for it in iters:
        for m in cfg.particle_counts:
            block = [c for c in result.cells if c.m == m]
            if not block:
                continue
            lx = {c.key: _safe_log10(float(c.mse_x[it])) for c in block}
            lf = {c.key: _safe_log10(float(c.mse_f[it])) for c in block}
            min_x, min_f = min(lx.values()), min(lf.values())
            for c in block:
                lines.append(
                    f"{it},{c.m},{format(c.sigma_n, 'g')},{format(c.length_scale, 'g')},"
                    f"{_fmt(lx[c.key])},{_band(lx[c.key], min_x)},"
                    f"{_fmt(lf[c.key])},{_band(lf[c.key], min_f)}"
                )
    return "\n".join(lines) + "\n"


def _mse_curves_text(result: ExperimentResult) -> str:
    header = "m,sigma_n,length_scale,iter,mse_x,log10_mse_x,mse_f,log10_mse_f"
    lines = [header]
    for c in result.cells:
        for it in range(result.config.iterations + 1):
            mx, mf = float(c.mse_x[it]), float(c.mse_f[it])
            lines.append(
                f"{c.m},{format(c.sigma_n, 'g')},{format(c.length_scale, 'g')},{it},"
                f"{_fmt(mx)},{_fmt(_safe_log10(mx))},{_fmt(mf)},{_fmt(_safe_log10(mf))}"
            )
    return "\n".join(lines) + "\n"


def _snapshots_text(result: ExperimentResult) -> str:
    header = "m,sigma_n,length_scale,seed,iter,kappa,x,theta,mu,sd,lower,upper"
    lines = [header]
    for c in result.cells:
        for r, trace in enumerate(c.traces):
            for snap in trace.snapshots:
                for x, theta, mu, sd in zip(snap.x_grid, snap.theta_grid, snap.mean, snap.sd):
                    lines.append(
                        f"{c.m},{format(c.sigma_n, 'g')},{format(c.length_scale, 'g')},{r},"
                        f"{snap.t},{_fmt(snap.kappa_t)},{_fmt(x)},{_fmt(theta)},"
                        f"{_fmt(mu)},{_fmt(sd)},"
                        f"{_fmt(mu - snap.kappa_t * sd)},{_fmt(mu + snap.kappa_t * sd)}"
                    )
    return "\n".join(lines) + "\n"


def _convergence_text(result: ExperimentResult) -> str:
    header = "m,sigma_n,length_scale,seed,t,abs_dx,abs_dmean"
    lines = [header]
    for c in result.cells:
        lo, hi = result.config.bo.bounds
        width = hi - lo
        for r in range(c.incumbents_x.shape[0]):
            for t in range(1, c.incumbents_x.shape[1]):
                dx = abs(c.incumbents_x[r, t] - c.incumbents_x[r, t - 1]) / width
                dm = abs(c.incumbents_mean[r, t] - c.incumbents_mean[r, t - 1])
                lines.append(
                    f"{c.m},{format(c.sigma_n, 'g')},{format(c.length_scale, 'g')},{r},{t},"
                    f"{_fmt(dx)},{_fmt(dm)}"
                )
    return "\n".join(lines) + "\n"


def _traces_text(result: ExperimentResult) -> str:
    header = ("m,sigma_n,length_scale,seed,t,x_evaluated,raw_value,std_value,"
              "kappa,incumbent_x,incumbent_mean,incumbent_kf_loglik")
    lines = [header]
    for c in result.cells:
        for r, trace in enumerate(c.traces):
            for rec in trace.records:
                lines.append(
                    f"{c.m},{format(c.sigma_n, 'g')},{format(c.length_scale, 'g')},{r},"
                    f"{rec.t},{_fmt(rec.x_evaluated)},{_fmt(rec.raw_value)},"
                    f"{_fmt(rec.std_value)},{_fmt(rec.kappa_t)},{_fmt(rec.incumbent_x)},"
                    f"{_fmt(rec.incumbent_mean)},{_fmt(c.incumbents_kf[r, rec.t])}"
                )
    return "\n".join(lines) + "\n"


def export_tables(result: ExperimentResult, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """Write all report CSVs and the manifest; returns written paths.

    Empty results produce header-only files.  Writes are atomic
    (temp file then rename).
    """
    if fmt != "csv":
        raise ValueError(f"unsupported export format {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    texts = {
        "table1.csv": _table1_text(result),
        "table2.csv": _table2_text(result),
        "mse_curves.csv": _mse_curves_text(result),
        "posterior_snapshots.csv": _snapshots_text(result),
        "convergence_increments.csv": _convergence_text(result),
        "traces.csv": _traces_text(result),
    }
    paths = []
    for name, text in texts.items():
        path = out / name
        _write_atomic(path, text)
        paths.append(path)
    manifest = {
        "config": config_to_dict(result.config),
        "master_seed": result.config.master_seed,
        "theta_star": result.theta_star,
        "kf_loglik_at_theta_star": result.loglik_star,
        "version": __version__,
        "files": list(texts),
    }
    manifest_path = out / "manifest.json"
    _write_atomic(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    paths.append(manifest_path)
    return paths


def read_mse_curves(path: str | Path) -> MSECurves:
    """Re-ingest an exported mse_curves.csv; exact float round trip."""
    rows = Path(path).read_text(encoding="utf-8").splitlines()
    if not rows or rows[0].split(",")[:4] != ["m", "sigma_n", "length_scale", "iter"]:
        raise ValueError(f"{path}: not an mse_curves file")
    data: dict[tuple[int, float, float], dict[int, tuple[float, float]]] = {}
    budget = 0
    for row in rows[1:]:
        m, sn, ls, it, mx, _, mf, _ = row.split(",")
        key = (int(m), float(sn), float(ls))
        it = int(it)
        budget = max(budget, it)
        data.setdefault(key, {})[it] = (float(mx), float(mf))
    mse_x = {}
    mse_f = {}
    for key, per_iter in data.items():
        mse_x[key] = np.array([per_iter[i][0] for i in range(budget + 1)])
        mse_f[key] = np.array([per_iter[i][1] for i in range(budget + 1)])
    return MSECurves(budget=budget, mse_x=mse_x, mse_f=mse_f)


# ---------------------------------------------------------------------------
# JSON configuration

def _get(d: dict, key: str, path: str, required: bool = True, default=None):
    if key not in d:
        if required:
            raise ConfigError(f"missing config field '{path}{key}'")
        return default
    return d[key]


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON-shaped dict.

    Raises ConfigError naming the offending field path.
    """
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    s = _get(raw, "series", "")
    if not isinstance(s, dict):
        raise ConfigError("series: must be an object")
    source = _get(s, "source", "series.")
    try:
        model = LinearGaussianModel(
            tau2=float(s.get("tau2", 0.012)),
            obs_var=float(s.get("obs_var", 1.043)),
            init_mean=float(s.get("init_mean", 0.0)),
            init_var=float(s.get("init_var", 4.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"series: {exc}") from None
    series = SeriesSource(
        kind=source,
        model=model,
        length=int(s.get("length", 500)),
        seed=int(s.get("seed", 1)),
        path=s.get("path"),
    )
    b = _get(raw, "bo", "")
    if not isinstance(b, dict):
        raise ConfigError("bo: must be an object")
    bounds_raw = _get(b, "bounds", "bo.")
    if not (isinstance(bounds_raw, (list, tuple)) and len(bounds_raw) == 2):
        raise ConfigError("bo.bounds: must be a [lo, hi] pair")
    init_points = b.get("init_points")
    template = BOTemplate(
        bounds=(float(bounds_raw[0]), float(bounds_raw[1])),
        delta=float(b.get("delta", 0.1)),
        eps_x=float(b.get("eps_x", 0.01)),
        eps_f=float(b.get("eps_f", 0.1)),
        patience=int(b.get("patience", 3)),
        acq_grid_size=int(b.get("acq_grid_size", 201)),
        brent_tol=float(b.get("brent_tol", 1e-6)),
        normalizer_reps=int(b.get("normalizer_reps", 5)),
        init_points=tuple(float(p) for p in init_points) if init_points is not None else None,
        snapshot_iters=tuple(int(i) for i in b.get("snapshot_iters", ())),
        snapshot_grid_size=int(b.get("snapshot_grid_size", 201)),
    )
    try:
        return ExperimentConfig(
            series=series,
            particle_counts=tuple(int(m) for m in _get(raw, "particle_counts", "")),
            sigma_n_grid=tuple(float(v) for v in _get(raw, "sigma_n_grid", "")),
            length_scale_grid=tuple(float(v) for v in _get(raw, "length_scale_grid", "")),
            repetitions=int(_get(raw, "repetitions", "")),
            iterations=int(_get(raw, "iterations", "")),
            bo=template,
            theta_probes=tuple(float(v) for v in _get(raw, "theta_probes", "")),
            master_seed=int(_get(raw, "master_seed", "")),
            output_dir=str(_get(raw, "output_dir", "")),
            sigma_f=float(raw.get("sigma_f", 1.0)),
            ess_threshold_fraction=float(raw.get("ess_threshold_fraction", 0.5)),
            table_iters=tuple(int(i) for i in raw.get("table_iters", (10,))),
        )
    except (TypeError,) as exc:
        raise ConfigError(str(exc)) from None


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Lossless JSON-shaped view of a config (round-trips through
    ``config_from_dict``)."""
    series = {
        "source": cfg.series.kind,
        "tau2": cfg.series.model.tau2,
        "obs_var": cfg.series.model.obs_var,
        "init_mean": cfg.series.model.init_mean,
        "init_var": cfg.series.model.init_var,
        "length": cfg.series.length,
        "seed": cfg.series.seed,
    }
    if cfg.series.path is not None:
        series["path"] = cfg.series.path
    bo = {
        "bounds": list(cfg.bo.bounds),
        "delta": cfg.bo.delta,
        "eps_x": cfg.bo.eps_x,
        "eps_f": cfg.bo.eps_f,
        "patience": cfg.bo.patience,
        "acq_grid_size": cfg.bo.acq_grid_size,
        "brent_tol": cfg.bo.brent_tol,
        "normalizer_reps": cfg.bo.normalizer_reps,
        "snapshot_iters": list(cfg.bo.snapshot_iters),
        "snapshot_grid_size": cfg.bo.snapshot_grid_size,
    }
    if cfg.bo.init_points is not None:
        bo["init_points"] = list(cfg.bo.init_points)
    return {
        "series": series,
        "particle_counts": list(cfg.particle_counts),
        "sigma_n_grid": list(cfg.sigma_n_grid),
        "length_scale_grid": list(cfg.length_scale_grid),
        "repetitions": cfg.repetitions,
        "iterations": cfg.iterations,
        "bo": bo,
        "theta_probes": list(cfg.theta_probes),
        "master_seed": cfg.master_seed,
        "output_dir": cfg.output_dir,
        "sigma_f": cfg.sigma_f,
        "ess_threshold_fraction": cfg.ess_threshold_fraction,
        "table_iters": list(cfg.table_iters),
    }


def desk_profile_dict() -> dict:
    """Small grid that preserves the qualitative findings; minutes of CPU."""
    return {
        "series": {"source": "simulate", "tau2": 0.012, "obs_var": 1.043,
                   "init_mean": 0.0, "init_var": 4.0, "length": 500, "seed": 1},
        "particle_counts": [1000, 10000],
        "sigma_n_grid": [0.3, 1.0],
        "length_scale_grid": [0.1, 0.2, 0.5],
        "repetitions": 20,
        "iterations": 30,
        "bo": {"bounds": [0.005, 0.025], "delta": 0.1, "eps_x": 0.01, "eps_f": 0.1,
               "patience": 3, "acq_grid_size": 201, "normalizer_reps": 5,
               "snapshot_iters": [1, 3, 5, 10, 30]},
        "theta_probes": [0.005, 0.010, 0.015, 0.020, 0.025],
        "master_seed": 101,
        "output_dir": "pfbo-results",
        "sigma_f": 1.0,
        "table_iters": [10, 30],
    }


def full_profile_dict() -> dict:
    """Full-scale grid: 100 repetitions, 100 iterations, m up to 1e5."""
    profile = desk_profile_dict()
    profile.update(
        particle_counts=[1000, 10000, 100000],
        sigma_n_grid=[0.2, 0.3, 0.5, 1.0],
        length_scale_grid=[0.1, 0.2, 0.3, 0.5, 1.0],
        repetitions=100,
        iterations=100,
        table_iters=[10, 100],
    )
    profile["bo"]["snapshot_iters"] = [1, 3, 5, 10, 30, 100]
    return profile
