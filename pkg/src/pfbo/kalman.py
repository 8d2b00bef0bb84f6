"""Exact log-likelihood and MLE for the linear Gaussian model.

The Kalman recursion gives the predictive density p(y_t | y_{1:t-1}) in
closed form, so the log-likelihood is evaluated without Monte Carlo
noise.  Its maximizer over the search interval serves as the ground
truth against which noisy optimization results are scored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ssm import LOG_2PI, LinearGaussianModel, TimeSeries
from .univar import grid_then_brent

__all__ = ["KalmanState", "MLEResult", "kalman_loglik", "kalman_mle"]


@dataclass(frozen=True)
class KalmanState:
    """Filtered state mean and variance after an update step."""

    mean: float
    var: float

    def __post_init__(self) -> None:
        if self.var < 0.0:
            raise ValueError(f"filtered variance must be >= 0, got {self.var}")


@dataclass(frozen=True)
class MLEResult:
    theta_star: float
    loglik_star: float


def kalman_loglik(theta: float, series: TimeSeries, model_base: LinearGaussianModel) -> float:
    """Exact log-likelihood of the series with system-noise variance ``theta``.

    ``model_base`` supplies the observation variance and initial-state
    distribution; ``theta`` overrides its tau2.  The recursion starts
    from x_0 ~ N(init_mean, init_var) followed by one transition, so the
    first predictive variance is init_var + theta + obs_var.
    """
    if theta < 0.0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    obs_var = model_base.obs_var
    mean = model_base.init_mean
    var = model_base.init_var
    ll = 0.0
    for y in series.values:
        var_pred = var + theta
        s = var_pred + obs_var
        resid = y - mean
        ll -= 0.5 * (LOG_2PI + math.log(s) + resid * resid / s)
        gain = var_pred / s
        mean += gain * resid
        var = (1.0 - gain) * var_pred
    return float(ll)


def kalman_mle(
    series: TimeSeries,
    bounds: tuple[float, float],
    model_base: LinearGaussianModel,
    tol: float = 1e-9,
    grid_points: int = 201,
) -> MLEResult:
    """Maximize the exact log-likelihood over the closed interval ``bounds``.

    Grid scan then Brent refinement; an endpoint winner is returned
    as-is, so boundary solutions (e.g. theta at 0 for smooth data) come
    back without error.
    """
    lo, hi = bounds
    if not (0.0 <= lo < hi):
        raise ValueError(f"need 0 <= lo < hi, got [{lo}, {hi}]")
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    result = grid_then_brent(
        lambda th: kalman_loglik(th, series, model_base), lo, hi, grid_points, tol
    )
    return MLEResult(result.x_star, result.f_star)
