"""Bayesian-optimization loop with GP-UCB acquisition.

The objective is a noisy scalar function of one parameter.  Raw values
are standardized by a Normalizer calibrated from repeated probe
evaluations, the parameter interval is mapped onto [0, 1], and each
iteration maximizes

    UCB_t(x) = mu_t(x) + kappa_t * s_t(x)

over the unit domain with a grid-plus-Brent search.  The incumbent is
the arg-max of the posterior mean.  Convergence is declared when both
the incumbent location and its posterior mean stop moving for a run of
consecutive iterations, but runs keep iterating to the full budget
unless configured to stop early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gp import GPDataset, GPHyperParams, GPPosterior, fit
from .ssm import STREAM_BO_EVAL, STREAM_NORMALIZER, stream_rng
from .univar import grid_then_brent

__all__ = [
    "Normalizer",
    "BOConfig",
    "BORecord",
    "BOTrace",
    "BOState",
    "PosteriorSnapshot",
    "build_normalizer",
    "kappa",
    "ucb_value",
    "bo_step",
    "check_convergence",
    "bo_run",
    "DEFAULT_HP",
]

SCALE_FLOOR = 1e-8

DEFAULT_HP = GPHyperParams(sigma_f=1.0, length_scale=0.2, sigma_n=0.3)
"""Hyperparameters used when the caller expresses no preference: the
best-performing cell of the benchmark grid."""

Objective = Callable[[float, np.random.Generator], float]
"""Noisy objective: maps (theta, rng) to a real value.  Deterministic
objectives simply ignore the generator."""


@dataclass(frozen=True)
class Normalizer:
    """Affine standardization of raw objective values."""

    mean: float
    scale: float

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValueError(f"scale must be > 0, got {self.scale}")

    def transform(self, value: float) -> float:
        return (value - self.mean) / self.scale

    def inverse(self, value: float) -> float:
        return value * self.scale + self.mean


def _probe_statistics(
    objective: Objective,
    probe_points: tuple[float, ...],
    reps: int,
    seed: int,
) -> tuple[float, float, np.ndarray]:
    """Grand mean, max per-point sample sd, and per-point means."""
    if len(probe_points) == 0:
        raise ValueError("probe_points must be non-empty")
    if reps < 2:
        raise ValueError(f"reps must be >= 2, got {reps}")
    values = np.empty((len(probe_points), reps))
    for i, theta in enumerate(probe_points):
        for r in range(reps):
            try:
                values[i, r] = objective(theta, stream_rng(seed, STREAM_NORMALIZER, i, r))
            except Exception as exc:
                raise RuntimeError(
                    f"objective evaluation failed at normalizer probe {i} "
                    f"(theta={theta}, repetition {r})"
                ) from exc
    grand_mean = float(values.mean())
    max_sd = float(values.std(axis=1, ddof=1).max())
    return grand_mean, max_sd, values.mean(axis=1)


def build_normalizer(
    objective: Objective,
    probe_points: tuple[float, ...],
    reps: int,
    seed: int,
) -> Normalizer:
    """Calibrate standardization from repeated probe evaluations.

    The mean is the grand mean of all evaluations; the scale is the
    maximum over probe points of the per-point sample standard
    deviation (the worst-case noise level over the domain), floored at
    1e-8.
    """
    grand_mean, max_sd, _ = _probe_statistics(objective, probe_points, reps, seed)
    return Normalizer(grand_mean, max(max_sd, SCALE_FLOOR))


def kappa(t: int, delta: float) -> float:
    """Iteration-dependent exploration weight sqrt(2 log(t^2 pi^2 / (6 delta)))."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.sqrt(2.0 * math.log(t * t * math.pi**2 / (6.0 * delta)))


def ucb_value(post: GPPosterior, x: float, kappa_t: float) -> float:
    """mu(x) + kappa_t * s(x) from the fitted posterior."""
    mean, variance = post.predict(x)
    return mean + kappa_t * math.sqrt(variance)


@dataclass(frozen=True)
class BOConfig:
    """Settings for one optimization run.

    ``init_points`` defaults to five equispaced parameter values over
    the bounds.  ``eps_x`` is in normalized [0, 1] units, ``eps_f`` in
    standardized objective units.
    """

    bounds: tuple[float, float]
    hp: GPHyperParams
    max_iters: int
    seed: int = 0
    delta: float = 0.1
    init_points: tuple[float, ...] | None = None
    eps_x: float = 0.01
    eps_f: float = 0.1
    patience: int = 3
    acq_grid_size: int = 201
    brent_tol: float = 1e-6
    normalizer_reps: int = 5
    stop_on_convergence: bool = False
    snapshot_iters: tuple[int, ...] = ()
    snapshot_grid_size: int = 201

    def __post_init__(self) -> None:
        lo, hi = self.bounds
        if not lo < hi:
            raise ValueError(f"need bounds lo < hi, got [{lo}, {hi}]")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.init_points is None:
            object.__setattr__(
                self, "init_points", tuple(float(x) for x in np.linspace(lo, hi, 5))
            )
        else:
            object.__setattr__(self, "init_points", tuple(float(x) for x in self.init_points))
        if len(self.init_points) == 0:
            raise ValueError("init_points must be non-empty")
        for p in self.init_points:
            if not lo <= p <= hi:
                raise ValueError(f"init point {p} outside bounds [{lo}, {hi}]")
        if self.eps_x <= 0.0 or self.eps_f <= 0.0:
            raise ValueError("eps_x and eps_f must be > 0")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.acq_grid_size < 2:
            raise ValueError(f"acq_grid_size must be >= 2, got {self.acq_grid_size}")

    def to_unit(self, theta: float) -> float:
        lo, hi = self.bounds
        return (theta - lo) / (hi - lo)

    def from_unit(self, x: float) -> float:
        lo, hi = self.bounds
        return lo + x * (hi - lo)


@dataclass(frozen=True)
class BORecord:
    """One evaluation: proposed point, values, and current incumbent."""

    t: int
    x_evaluated: float  # parameter units
    raw_value: float
    std_value: float
    kappa_t: float  # nan for initial-design rows
    incumbent_x: float  # parameter units
    incumbent_mean: float  # standardized units


@dataclass(frozen=True)
class PosteriorSnapshot:
    """Posterior mean/sd on a grid, taken after iteration ``t``."""

    t: int
    kappa_t: float
    theta_grid: np.ndarray
    x_grid: np.ndarray
    mean: np.ndarray
    sd: np.ndarray


@dataclass
class BOTrace:
    """Per-iteration records of one run, plus convergence bookkeeping."""

    bounds: tuple[float, float]
    records: list[BORecord] = field(default_factory=list)
    converged_at: int | None = None
    snapshots: list[PosteriorSnapshot] = field(default_factory=list)

    def incumbent_series(self) -> list[tuple[int, float, float]]:
        """(t, incumbent_x, incumbent_mean) with one entry per iteration.

        Initial-design rows share t = 0; the last record of each t wins.
        """
        by_t: dict[int, BORecord] = {}
        for rec in self.records:
            by_t[rec.t] = rec
        return [(t, by_t[t].incumbent_x, by_t[t].incumbent_mean) for t in sorted(by_t)]


@dataclass(frozen=True)
class BOState:
    """Dataset, fitted posterior and iteration counter between steps."""

    dataset: GPDataset
    posterior: GPPosterior
    t: int


def _argmax_mean(post: GPPosterior, config: BOConfig):
    return grid_then_brent(
        lambda x: post.predict(x)[0],
        0.0,
        1.0,
        config.acq_grid_size,
        config.brent_tol,
        f_batch=lambda xs: post.predict_many(xs)[0],
    )


def bo_step(
    state: BOState,
    objective: Objective,
    config: BOConfig,
    normalizer: Normalizer,
) -> tuple[BOState, BORecord]:
    """One acquisition-evaluate-refit cycle.

    Maximizes the UCB on the unit domain, evaluates the objective at
    the de-normalized winner, appends the standardized value, refits
    the posterior and relocates the incumbent.
    """
    t = state.t + 1
    kappa_t = kappa(t, config.delta)
    post = state.posterior

    def acq(x: float) -> float:
        return ucb_value(post, x, kappa_t)

    def acq_batch(xs: np.ndarray) -> np.ndarray:
        means, variances = post.predict_many(xs)
        return means + kappa_t * np.sqrt(variances)

    proposal = grid_then_brent(
        acq, 0.0, 1.0, config.acq_grid_size, config.brent_tol, f_batch=acq_batch
    )
    theta_next = config.from_unit(proposal.x_star)
    rng = stream_rng(config.seed, STREAM_BO_EVAL, len(config.init_points) + t - 1)
    try:
        raw = float(objective(theta_next, rng))
    except Exception as exc:
        raise RuntimeError(f"objective evaluation failed at iteration {t}") from exc
    std = normalizer.transform(raw)
    dataset = state.dataset.append(proposal.x_star, std)
    refit = fit(dataset, config.hp)
    incumbent = _argmax_mean(refit, config)
    record = BORecord(
        t=t,
        x_evaluated=theta_next,
        raw_value=raw,
        std_value=std,
        kappa_t=kappa_t,
        incumbent_x=config.from_unit(incumbent.x_star),
        incumbent_mean=incumbent.f_star,
    )
    return BOState(dataset, refit, t), record


def check_convergence(trace: BOTrace, eps_x: float, eps_f: float, patience: int) -> bool:
    """True when the last ``patience`` incumbent moves are all small.

    Location differences are measured on the normalized [0, 1] domain,
    mean differences in standardized units.
    """
    series = trace.incumbent_series()
    if len(series) < patience + 1:
        return False
    lo, hi = trace.bounds
    width = hi - lo
    tail = series[-(patience + 1):]
    for (_, x_a, m_a), (_, x_b, m_b) in zip(tail, tail[1:]):
        if abs(x_b - x_a) / width >= eps_x or abs(m_b - m_a) >= eps_f:
            return False
    return True


def _default_normalizer(objective: Objective, config: BOConfig) -> Normalizer:
    """Probe the objective at the initial design points.

    When every probe point shows zero sample variance (deterministic
    objective), the per-point sd collapses to the floor; the spread of
    the per-point means across the domain is used instead so
    standardized values stay O(1).
    """
    grand_mean, max_sd, point_means = _probe_statistics(
        objective, config.init_points, config.normalizer_reps, config.seed
    )
    scale = max(max_sd, SCALE_FLOOR)
    if max_sd < SCALE_FLOOR and len(point_means) > 1:
        scale = max(float(point_means.std()), SCALE_FLOOR)
    return Normalizer(grand_mean, scale)


def _maybe_snapshot(trace: BOTrace, post: GPPosterior, t: int, kappa_t: float, config: BOConfig) -> None:
    if t not in config.snapshot_iters:
        return
    xs = np.linspace(0.0, 1.0, config.snapshot_grid_size)
    means, variances = post.predict_many(xs)
    thetas = np.array([config.from_unit(x) for x in xs])
    trace.snapshots.append(
        PosteriorSnapshot(t, kappa_t, thetas, xs, means, np.sqrt(variances))
    )


def bo_run(
    objective: Objective,
    config: BOConfig,
    normalizer: Normalizer | None = None,
) -> BOTrace:
    """Full optimization run: initial design, then UCB iterations.

    Evaluates the initial design points, fits the surrogate, and
    iterates ``bo_step`` up to ``config.max_iters``.  The first
    iteration at which the convergence criterion fires is recorded in
    ``trace.converged_at``; the loop stops there only when
    ``config.stop_on_convergence`` is set, otherwise the full budget is
    spent so per-iteration error curves stay comparable across runs.
    Identical (objective, config, normalizer) inputs reproduce the
    trace exactly.
    """
    if normalizer is None:
        normalizer = _default_normalizer(objective, config)

    trace = BOTrace(bounds=config.bounds)
    dataset = GPDataset()
    raws = []
    for k, theta in enumerate(config.init_points):
        rng = stream_rng(config.seed, STREAM_BO_EVAL, k)
        try:
            raw = float(objective(theta, rng))
        except Exception as exc:
            raise RuntimeError(f"objective evaluation failed at init point {k}") from exc
        raws.append(raw)
        dataset = dataset.append(config.to_unit(theta), normalizer.transform(raw))
    post = fit(dataset, config.hp)
    if len(config.init_points) > 0:
        incumbent = _argmax_mean(post, config)
        inc_x, inc_mean = config.from_unit(incumbent.x_star), incumbent.f_star
        for k, theta in enumerate(config.init_points):
            trace.records.append(
                BORecord(
                    t=0,
                    x_evaluated=float(theta),
                    raw_value=raws[k],
                    std_value=float(dataset.targets[k]),
                    kappa_t=float("nan"),
                    incumbent_x=inc_x,
                    incumbent_mean=inc_mean,
                )
            )
    _maybe_snapshot(trace, post, 0, 0.0, config)

    state = BOState(dataset, post, 0)
    for _ in range(config.max_iters):
        state, record = bo_step(state, objective, config, normalizer)
        trace.records.append(record)
        _maybe_snapshot(trace, state.posterior, state.t, record.kappa_t, config)
        if trace.converged_at is None and check_convergence(
            trace, config.eps_x, config.eps_f, config.patience
        ):
            trace.converged_at = state.t
            if config.stop_on_convergence:
                break
    return trace
