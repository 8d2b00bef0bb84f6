"""Particle-filter approximation of the log-likelihood.

Runs the bootstrap filter: initialize from p(x_0), propagate through
the transition kernel, reweight by the observation likelihood, and
resample systematically when the effective sample size drops below a
threshold.  The per-step predictive likelihood uses the pre-update
weights,

    p_hat(y_t | y_{1:t-1}) = sum_i w_{t-1}^(i) p(y_t | x_t^(i)),

accumulated in the log domain with a max-shift so long series never
underflow.  The resulting likelihood estimator (in the linear domain)
is unbiased; the log-likelihood estimator is biased low by Jensen's
inequality with variance decaying as O(1/m).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ssm import STREAM_FILTER, StateSpaceModel, LinearGaussianModel, TimeSeries, stream_rng

__all__ = [
    "ParticleState",
    "PFConfig",
    "PFResult",
    "ParticleDegeneracyError",
    "ess",
    "systematic_resample",
    "pf_loglik",
    "pf_objective",
]

_WEIGHT_SUM_TOL = 1e-9


class ParticleDegeneracyError(RuntimeError):
    """All particle likelihoods underflowed to zero at one step."""

    def __init__(self, step: int):
        super().__init__(f"particle degeneracy: all weights vanished at step {step}")
        self.step = step


@dataclass(frozen=True)
class ParticleState:
    """Weighted particle set approximating the filtering distribution."""

    particles: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.particles, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if p.shape != w.shape or p.ndim != 1 or p.size < 1:
            raise ValueError("particles and weights must be equal-length 1-D arrays")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {w.sum()}")
        object.__setattr__(self, "particles", p)
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return int(self.particles.size)


@dataclass(frozen=True)
class PFConfig:
    """Particle count, resampling threshold and seed for one filter run."""

    m: int
    ess_threshold_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"particle count must be >= 1, got {self.m}")
        if not 0.0 < self.ess_threshold_fraction <= 1.0:
            raise ValueError(
                f"ess_threshold_fraction must be in (0, 1], got {self.ess_threshold_fraction}"
            )


@dataclass(frozen=True)
class PFResult:
    """Estimated log-likelihood and its per-step decomposition."""

    loglik: float
    per_step_loglik: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.per_step_loglik, dtype=np.float64, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "per_step_loglik", arr)
        if abs(self.loglik - float(arr.sum())) > 1e-10:
            raise ValueError("loglik must equal the sum of per-step terms")


def ess(weights: np.ndarray) -> float:
    """Effective sample size 1 / sum(w_i^2) of a normalized weight vector."""
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise ValueError("weights must be non-empty")
    total = float(w.sum())
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise ValueError(f"weights must be normalized, sum is {total}")
    return float(1.0 / np.sum(w * w))


def systematic_resample(weights: np.ndarray, u: float) -> np.ndarray:
    """Ancestor indices from systematic resampling with offset ``u``.

    Positions (u + j) / m for j = 0..m-1 are matched against the
    cumulative weight partition, so index i is drawn either
    floor(m * w_i) or ceil(m * w_i) times.  Output is sorted
    non-decreasing.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must be in [0, 1), got {u}")
    w = np.asarray(weights, dtype=np.float64)
    m = w.size
    positions = (u + np.arange(m)) / m
    cumulative = np.cumsum(w)
    cumulative[-1] = max(cumulative[-1], 1.0)  # guard rounding below 1
    return np.minimum(np.searchsorted(cumulative, positions, side="right"), m - 1)


def pf_loglik(
    theta: float,
    series: TimeSeries,
    model_base: LinearGaussianModel,
    cfg: PFConfig,
    on_step: Callable[[int, ParticleState, float], None] | None = None,
) -> PFResult:
    """Noisy log-likelihood estimate at system-noise variance ``theta``.

    Deterministic given ``cfg.seed``: all draws (initial particles,
    transitions, resampling offsets) come from the single stream
    (seed, STREAM_FILTER) in a fixed order.  ``on_step`` is a
    diagnostic hook called after each step with (t, state, step_ll).

    Raises ParticleDegeneracyError when every particle's observation
    likelihood underflows to zero at some step.
    """
    if theta < 0.0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    model = model_base.with_tau2(theta)
    return _run_filter(model, series, cfg.m, cfg.ess_threshold_fraction,
                       stream_rng(cfg.seed, STREAM_FILTER), on_step)


def pf_objective(
    series: TimeSeries,
    model_base: LinearGaussianModel,
    m: int,
    ess_threshold_fraction: float = 0.5,
) -> Callable[[float, np.random.Generator], float]:
    """Wrap the filter as an objective ``f(theta, rng) -> loglik``.

    The caller owns the generator, so repeated calls at the same theta
    give fresh noisy estimates; this is the form the optimizer consumes.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")

    def objective(theta: float, rng: np.random.Generator) -> float:
        if theta < 0.0:
            raise ValueError(f"theta must be >= 0, got {theta}")
        model = model_base.with_tau2(theta)
        return _run_filter(model, series, m, ess_threshold_fraction, rng).loglik

    return objective


def _run_filter(
    model: StateSpaceModel,
    series: TimeSeries,
    m: int,
    ess_fraction: float,
    rng: np.random.Generator,
    on_step: Callable[[int, ParticleState, float], None] | None = None,
) -> PFResult:
    particles = model.sample_initial(rng, m)
    weights = np.full(m, 1.0 / m)
    threshold = ess_fraction * m
    per_step = np.empty(len(series))
    for t, y in enumerate(series.values, start=1):
        particles = model.sample_transition(particles, rng)
        log_obs = model.observation_log_density(particles, float(y))
        shift = float(np.max(log_obs))
        if not np.isfinite(shift):
            raise ParticleDegeneracyError(t)
        scaled = np.exp(log_obs - shift)
        predictive = float(np.dot(weights, scaled))  # pre-update weights
        if predictive <= 0.0 or not np.isfinite(predictive):
            raise ParticleDegeneracyError(t)
        per_step[t - 1] = shift + np.log(predictive)
        weights = weights * scaled
        weights /= weights.sum()
        if ess(weights) < threshold:
            ancestors = systematic_resample(weights, float(rng.random()))
            particles = particles[ancestors]
            weights = np.full(m, 1.0 / m)
        if on_step is not None:
            on_step(t, ParticleState(particles, weights), float(per_step[t - 1]))
    return PFResult(float(per_step.sum()), per_step)
