"""Gaussian-process surrogate over the unit interval.

Squared-exponential kernel, zero prior mean (targets are standardized
before fitting), and a noisy-observation posterior

    mu(x)     = k(x)^T (K + sigma_n^2 I)^-1 y
    sigma2(x) = k(x, x) - k(x)^T (K + sigma_n^2 I)^-1 k(x)

computed through a single Cholesky factorization.  Inputs are expected
in [0, 1]; callers map the parameter interval affinely onto the unit
domain before any kernel evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

__all__ = ["GPHyperParams", "GPDataset", "GPPosterior", "se_kernel", "fit"]

# Relative diagonal jitter: start value and escalation ceiling.
_JITTER_START = 1e-10
_JITTER_MAX = 1e-6


@dataclass(frozen=True)
class GPHyperParams:
    """Signal scale, length scale (unit-domain units) and noise scale."""

    sigma_f: float
    length_scale: float
    sigma_n: float

    def __post_init__(self) -> None:
        if not self.sigma_f > 0.0:
            raise ValueError(f"sigma_f must be > 0, got {self.sigma_f}")
        if not self.length_scale > 0.0:
            raise ValueError(f"length_scale must be > 0, got {self.length_scale}")
        if self.sigma_n < 0.0:
            raise ValueError(f"sigma_n must be >= 0, got {self.sigma_n}")


@dataclass(frozen=True)
class GPDataset:
    """Observed (normalized input, standardized target) pairs."""

    inputs: np.ndarray = field(default_factory=lambda: np.empty(0))
    targets: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self) -> None:
        x = np.array(self.inputs, dtype=np.float64, copy=True).reshape(-1)
        y = np.array(self.targets, dtype=np.float64, copy=True).reshape(-1)
        if x.size != y.size:
            raise ValueError(f"inputs ({x.size}) and targets ({y.size}) differ in length")
        if x.size and (x.min() < 0.0 or x.max() > 1.0):
            raise ValueError("inputs must lie in [0, 1]")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("inputs and targets must be finite")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "targets", y)

    def __len__(self) -> int:
        return int(self.inputs.size)

    def append(self, x: float, y: float) -> "GPDataset":
        return GPDataset(np.append(self.inputs, x), np.append(self.targets, y))


def se_kernel(x: float, x_prime: float, hp: GPHyperParams) -> float:
    """sigma_f^2 * exp(-(x - x')^2 / (2 * length_scale^2))."""
    d = x - x_prime
    return hp.sigma_f**2 * math.exp(-d * d / (2.0 * hp.length_scale**2))


def _kernel_matrix(xs: np.ndarray, hp: GPHyperParams) -> np.ndarray:
    d = xs[:, None] - xs[None, :]
    return hp.sigma_f**2 * np.exp(-d * d / (2.0 * hp.length_scale**2))


def _kernel_cross(xs: np.ndarray, queries: np.ndarray, hp: GPHyperParams) -> np.ndarray:
    d = xs[:, None] - queries[None, :]
    return hp.sigma_f**2 * np.exp(-d * d / (2.0 * hp.length_scale**2))


class GPPosterior:
    """Factorized posterior; immutable after ``fit``.

    Holds the lower-triangular Cholesky factor of
    K + sigma_n^2 I + jitter I and the precomputed solve against the
    targets, so mean queries are O(t) and variance queries O(t^2).
    """

    def __init__(
        self,
        dataset: GPDataset,
        hp: GPHyperParams,
        chol: np.ndarray | None,
        alpha: np.ndarray | None,
        jitter: float,
    ):
        self.dataset = dataset
        self.hp = hp
        self._chol = chol
        self._alpha = alpha
        self.jitter = jitter

    def predict(self, x: float) -> tuple[float, float]:
        """Posterior mean and variance at one point; variance clamped to >= 0."""
        means, variances = self.predict_many(np.array([x]))
        return float(means[0]), float(variances[0])

    def predict_many(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized posterior mean and variance over query points."""
        xs = np.asarray(xs, dtype=np.float64)
        prior_var = self.hp.sigma_f**2
        if self._chol is None:
            return np.zeros(xs.shape), np.full(xs.shape, prior_var)
        k = _kernel_cross(self.dataset.inputs, xs, self.hp)
        means = k.T @ self._alpha
        v = solve_triangular(self._chol, k, lower=True, check_finite=False)
        variances = np.maximum(prior_var - np.sum(v * v, axis=0), 0.0)
        return means, variances


def fit(dataset: GPDataset, hp: GPHyperParams) -> GPPosterior:
    """Factorize the kernel system once; empty datasets give the prior.

    Jitter starts at 1e-10 * sigma_f^2 and escalates tenfold up to
    1e-6 * sigma_f^2 if the factorization fails (repeated inputs with
    sigma_n = 0 are the usual cause beyond that).
    """
    t = len(dataset)
    if t == 0:
        return GPPosterior(dataset, hp, None, None, 0.0)
    system = _kernel_matrix(dataset.inputs, hp) + hp.sigma_n**2 * np.eye(t)
    jitter = _JITTER_START
    while True:
        try:
            chol = np.linalg.cholesky(system + jitter * hp.sigma_f**2 * np.eye(t))
            break
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > _JITTER_MAX:
                raise np.linalg.LinAlgError(
                    "kernel system not positive definite after jitter escalation; "
                    "likely duplicated inputs with sigma_n = 0"
                ) from None
    tmp = solve_triangular(chol, dataset.targets, lower=True, check_finite=False)
    alpha = solve_triangular(chol.T, tmp, lower=False, check_finite=False)
    return GPPosterior(dataset, hp, chol, alpha, jitter)
