"""State-space model definitions and synthetic data generation.

The concrete model is a one-dimensional Gaussian random walk observed
through additive Gaussian noise:

    x_t = x_{t-1} + v_t,      v_t ~ N(0, tau2)
    y_t = x_t + w_t,          w_t ~ N(0, obs_var)
    x_0 ~ N(init_mean, init_var)

All randomness flows through PCG64 generators derived from an integer
seed plus a purpose tag (see :func:`stream_rng`), so simulation draws,
particle-filter draws and experiment replicates never share a stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

__all__ = [
    "StateSpaceModel",
    "LinearGaussianModel",
    "TimeSeries",
    "simulate",
    "load_series",
    "save_series",
    "stream_rng",
    "derive_seed",
]

LOG_2PI = math.log(2.0 * math.pi)

# Purpose tags for RNG stream splitting.  A stream is identified by
# (seed, purpose, *indices); distinct purposes with the same seed are
# statistically independent PCG64 streams.
STREAM_SIMULATE = 0
STREAM_FILTER = 1
STREAM_NORMALIZER = 2
STREAM_BO_EVAL = 3
STREAM_EXPERIMENT = 4


def stream_rng(seed: int, *path: int) -> np.random.Generator:
    """Deterministic PCG64 generator for the stream (seed, *path).

    Uses ``numpy.random.SeedSequence`` spawn keys, so streams with
    different paths are independent even for equal seeds.
    """
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(path)))


def derive_seed(seed: int, *path: int) -> int:
    """Integer sub-seed for the stream (seed, *path), for APIs taking seeds."""
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


@runtime_checkable
class StateSpaceModel(Protocol):
    """Minimal interface a model must provide to the particle filter."""

    def sample_initial(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` initial states from p(x_0)."""

    def sample_transition(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Propagate each state one step through the transition kernel."""

    def observation_log_density(self, states: np.ndarray, observation: float) -> np.ndarray:
        """log p(y | x) for each state; finite for all finite inputs."""


@dataclass(frozen=True)
class LinearGaussianModel:
    """Gaussian random-walk state with direct noisy observation.

    ``tau2`` is the system-noise variance (the single unknown parameter
    in the built-in experiments), ``obs_var`` the observation-noise
    variance, and (init_mean, init_var) the initial-state distribution.
    """

    tau2: float
    obs_var: float = 1.043
    init_mean: float = 0.0
    init_var: float = 4.0

    def __post_init__(self) -> None:
        for name in ("tau2", "obs_var", "init_mean", "init_var"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.tau2 < 0.0:
            raise ValueError(f"tau2 must be >= 0, got {self.tau2}")
        if self.obs_var <= 0.0:
            raise ValueError(f"obs_var must be > 0, got {self.obs_var}")
        if self.init_var <= 0.0:
            raise ValueError(f"init_var must be > 0, got {self.init_var}")

    def with_tau2(self, tau2: float) -> "LinearGaussianModel":
        """Copy of this model with the system-noise variance replaced."""
        return LinearGaussianModel(tau2, self.obs_var, self.init_mean, self.init_var)

    def sample_initial(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.init_mean, math.sqrt(self.init_var), size)

    def sample_transition(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return states + rng.normal(0.0, math.sqrt(self.tau2), states.shape)

    def observation_log_density(self, states: np.ndarray, observation: float) -> np.ndarray:
        resid = observation - states
        return -0.5 * (resid * resid / self.obs_var + LOG_2PI + math.log(self.obs_var))


@dataclass(frozen=True)
class TimeSeries:
    """Immutable observation sequence y_1..y_T."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 1:
            raise ValueError("series must contain at least one observation")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"non-finite observation at position {bad}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)


def simulate(model: LinearGaussianModel, length: int, seed: int) -> TimeSeries:
    """Generate a synthetic series of ``length`` observations.

    Bit-identical output for identical (model, length, seed): the
    simulation stream is (seed, STREAM_SIMULATE) and the draw order is
    fixed (x_0, all system noises, all observation noises).
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    rng = stream_rng(seed, STREAM_SIMULATE)
    x0 = rng.normal(model.init_mean, math.sqrt(model.init_var))
    v = rng.normal(0.0, math.sqrt(model.tau2), length)
    w = rng.normal(0.0, math.sqrt(model.obs_var), length)
    states = x0 + np.cumsum(v)
    return TimeSeries(states + w)


def load_series(path: str | Path) -> TimeSeries:
    """Read a single-column CSV of observations.

    One decimal number per line, optional ``y`` header, UTF-8, LF or
    CRLF line endings.  Blank lines are ignored.
    """
    text = Path(path).read_text(encoding="utf-8-sig")
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        entry = line.strip()
        if not entry:
            continue
        if lineno == 1 and entry.lower() == "y":
            continue
        try:
            values.append(float(entry))
        except ValueError:
            raise ValueError(f"{path}: non-numeric value {entry!r} at line {lineno}") from None
    if not values:
        raise ValueError(f"{path}: empty series")
    return TimeSeries(np.array(values))


def save_series(series: TimeSeries, path: str | Path) -> None:
    """Write a series as single-column CSV with a ``y`` header."""
    lines = ["y"] + [format(v, ".17g") for v in series.values]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
