"""Maximum-likelihood estimation for state-space models when the
log-likelihood is only available as a noisy particle-filter estimate.

The pieces, roughly in dependency order: exact linear Gaussian model
and Kalman baseline (:mod:`.ssm`, :mod:`.kalman`), the bootstrap
particle filter (:mod:`.pfilter`), a Gaussian-process surrogate with
an upper-confidence-bound acquisition rule (:mod:`.gp`, :mod:`.bo`),
and a benchmark harness with CSV export and figure rendering
(:mod:`.bench`, :mod:`.plots`).
"""

__version__ = "0.1.0"

from .bench import (
    BOTemplate,
    CellResult,
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    LogLikStats,
    MSECurves,
    SeriesSource,
    config_from_dict,
    config_to_dict,
    desk_profile_dict,
    export_tables,
    loglik_stats,
    full_profile_dict,
    read_mse_curves,
    run_experiment,
)
from .bo import (
    DEFAULT_HP,
    BOConfig,
    BORecord,
    BOTrace,
    Normalizer,
    PosteriorSnapshot,
    bo_run,
    bo_step,
    build_normalizer,
    check_convergence,
    kappa,
    ucb_value,
)
from .gp import GPDataset, GPHyperParams, GPPosterior, fit, se_kernel
from .kalman import MLEResult, kalman_loglik, kalman_mle
from .pfilter import (
    ParticleDegeneracyError,
    ParticleState,
    PFConfig,
    PFResult,
    ess,
    pf_loglik,
    pf_objective,
    systematic_resample,
)
from .ssm import (
    LinearGaussianModel,
    TimeSeries,
    derive_seed,
    load_series,
    save_series,
    simulate,
    stream_rng,
)
from .univar import OptResult, brent_max, grid_max, grid_then_brent

__all__ = [
    "__version__",
    # ssm
    "LinearGaussianModel", "TimeSeries", "simulate", "load_series",
    "save_series", "stream_rng", "derive_seed",
    # kalman
    "kalman_loglik", "kalman_mle", "MLEResult",
    # pfilter
    "PFConfig", "PFResult", "ParticleState", "ParticleDegeneracyError",
    "pf_loglik", "pf_objective", "ess", "systematic_resample",
    # gp
    "GPHyperParams", "GPDataset", "GPPosterior", "fit", "se_kernel",
    # univar
    "OptResult", "grid_max", "brent_max", "grid_then_brent",
    # bo
    "BOConfig", "BORecord", "BOTrace", "Normalizer", "PosteriorSnapshot",
    "DEFAULT_HP", "bo_run", "bo_step", "build_normalizer",
    "check_convergence", "kappa", "ucb_value",
    # bench
    "SeriesSource", "BOTemplate", "ExperimentConfig", "ExperimentResult",
    "CellResult", "LogLikStats", "MSECurves", "ConfigError",
    "loglik_stats", "run_experiment", "export_tables", "read_mse_curves",
    "config_from_dict", "config_to_dict", "desk_profile_dict",
    "full_profile_dict",
]
