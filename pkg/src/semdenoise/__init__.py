"""Single-image noise estimation and adaptive Wiener filtering.

The package measures an image's row autocorrelation, extrapolates the
noise-free lag-zero peak to estimate SNR, maps that estimate to a noise
variance with a tuned Gaussian-process regressor, and drives an adaptive
Wiener filter with the result. Supporting pieces: seeded noise injection,
PGM I/O, an epsilon-SVR alternative, Bayesian hyperparameter search,
image-quality metrics, and paired t-test reporting.
"""

__version__ = "0.1.0"

from .acf import AcfCurve, compute_acf
from .errors import (
    DataError,
    DegenerateAcfError,
    DegenerateStatsError,
    FitError,
    PgmError,
)
from .filters import (
    FilterConfig,
    average_filter,
    gaussian_filter,
    median_filter,
    wiener_frequency,
    wiener_nv,
)
from .image import GrayImage, NoiseSpec, add_awgn, load_pgm, make_synthetic, save_pgm
from .pipeline import (
    PipelineModel,
    benchmark_filters,
    benchmark_snr,
    generate_dataset,
    load_pipeline,
    run_aogprllsr,
    save_pipeline,
    synthetic_corpus,
    train_pipeline,
)
from .regression import (
    KernelSpec,
    gpr_fit,
    gpr_predict,
    regression_metrics,
    svr_fit,
    svr_predict,
)
from .bayesopt import bayes_optimize, tune_optimizable_gpr, tune_optimizable_svm
from .snr import actual_snr, estimate_snr, noise_variance_from_acf
from .stats import cosine_similarity, mse, paired_t_test, psnr, ssim

__all__ = [
    "AcfCurve",
    "DataError",
    "DegenerateAcfError",
    "DegenerateStatsError",
    "FilterConfig",
    "FitError",
    "GrayImage",
    "KernelSpec",
    "NoiseSpec",
    "PgmError",
    "PipelineModel",
    "actual_snr",
    "add_awgn",
    "average_filter",
    "bayes_optimize",
    "benchmark_filters",
    "benchmark_snr",
    "compute_acf",
    "cosine_similarity",
    "estimate_snr",
    "gaussian_filter",
    "generate_dataset",
    "gpr_fit",
    "gpr_predict",
    "load_pgm",
    "load_pipeline",
    "make_synthetic",
    "median_filter",
    "mse",
    "noise_variance_from_acf",
    "paired_t_test",
    "psnr",
    "regression_metrics",
    "run_aogprllsr",
    "save_pgm",
    "save_pipeline",
    "ssim",
    "svr_fit",
    "svr_predict",
    "synthetic_corpus",
    "train_pipeline",
    "tune_optimizable_gpr",
    "tune_optimizable_svm",
    "wiener_frequency",
    "wiener_nv",
]
