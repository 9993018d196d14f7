"""End-to-end noise estimation and filtering pipeline.

The chain: corrupt (or receive) an image, measure its row autocorrelation,
estimate SNR with the least-squares extrapolator, feed those features to a
tuned regressor that predicts the noise variance, and hand that variance to
the adaptive Wiener filter. This module also houses the dataset generator,
the trainer, and the two benchmark harnesses with their CSV layouts.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .acf import DEFAULT_MAX_LAG, AcfCurve, compute_acf, usable_max_lag
from .bayesopt import (
    DEFAULT_TUNE_BUDGET,
    fit_gpr_config,
    fit_svm_config,
    gpr_preset_configs,
    tune_optimizable_gpr,
)
from .errors import DataError, DegenerateAcfError
from .filters import (
    FilterConfig,
    average_filter,
    gaussian_filter,
    median_filter,
    wiener_nv,
)
from .image import GrayImage, NoiseSpec, add_awgn, make_synthetic
from .regression import (
    RegressionMetrics,
    TrainedGpr,
    TrainedSvr,
    gpr_predict,
    gpr_predict_batch,
    model_from_dict,
    model_to_dict,
    regression_metrics,
    svr_predict,
    svr_predict_batch,
)
from .rng import CounterRng
from .snr import (
    METHODS,
    SnrEstimate,
    actual_snr,
    estimate_snr,
    noise_variance_from_acf,
    snr_lsr,
)
from .stats import TTestReport, mse, paired_t_test, psnr, ssim

# ---------------------------------------------------------------------------
# feature assembly

FEATURE_SPECS = ("snr_db", "extended")

# dataset column names backing each feature spec, in order
_FEATURE_COLUMNS = {
    "snr_db": ("snr_db",),
    "extended": ("snr_linear", "acf0", "mean_sq", "acf1"),
}


def feature_columns(feature_spec: str) -> tuple:
    try:
        return _FEATURE_COLUMNS[feature_spec]
    except KeyError:
        raise ValueError(
            f"unknown feature spec {feature_spec!r}; expected one of {FEATURE_SPECS}")


def feature_vector(curve: AcfCurve, estimate: SnrEstimate,
                   feature_spec: str) -> np.ndarray:
    row = {
        "snr_db": estimate.snr_db,
        "snr_linear": estimate.snr_linear,
        "acf0": curve.value(0),
        "mean_sq": curve.mean_sq,
        "acf1": curve.value(1),
    }
    return np.asarray([row[c] for c in feature_columns(feature_spec)],
                      dtype=np.float64)


# ---------------------------------------------------------------------------
# dataset generation

_DATASET_COLUMNS = ("image_id", "injected_nv", "noise_seed", "noise_stream",
                    "snr_db", "snr_linear", "acf0", "mean_sq", "acf1",
                    "actual_snr_db")


@dataclass(frozen=True)
class Dataset:
    """Feature rows labelled with the injected noise variance."""

    image_ids: tuple
    injected_nv: np.ndarray
    noise_seeds: np.ndarray
    noise_streams: np.ndarray
    snr_db: np.ndarray
    snr_linear: np.ndarray
    acf0: np.ndarray
    mean_sq: np.ndarray
    acf1: np.ndarray
    actual_snr_db: np.ndarray
    skipped: tuple = ()

    @property
    def n_rows(self) -> int:
        return len(self.image_ids)

    def features(self, feature_spec: str) -> np.ndarray:
        cols = [getattr(self, c) for c in feature_columns(feature_spec)]
        return np.column_stack(cols)

    def labels(self) -> np.ndarray:
        return self.injected_nv.copy()


def _normalize_corpus(clean_images) -> list:
    """Accept plain images or (id, image) pairs; ids must be CSV-safe."""
    corpus = []
    for i, item in enumerate(clean_images):
        if isinstance(item, GrayImage):
            corpus.append((f"img{i:03d}", item))
        else:
            image_id, image = item
            if "," in image_id or "\n" in image_id:
                raise ValueError(f"image id {image_id!r} not CSV-safe")
            corpus.append((str(image_id), image))
    return corpus


def synthetic_corpus(n_images: int, width: int = 64, height: int = 64,
                     seed: int = 0) -> list:
    """Textured test images: alternating blob and bandlimited-noise scenes.

    The smooth gradient kind is left out on purpose: its autocorrelation
    barely drops off lag zero, which starves every peak extrapolator.
    """
    if n_images < 1:
        raise ValueError("need at least one image")
    corpus = []
    for i in range(n_images):
        kind = "blobs" if i % 2 == 0 else "bandlimited"
        corpus.append((f"{kind}{i:03d}",
                       make_synthetic(kind, width, height, seed=seed + i)))
    return corpus


def generate_dataset(clean_images, nv_grid, seeds_per_level: int,
                     base_seed: int = 0,
                     max_lag: int = DEFAULT_MAX_LAG) -> Dataset:
    """Corrupt each image at each noise level with several seeds; one row each.

    Rows where the SNR estimator degenerates (flat or over-extrapolated
    autocorrelation, non-finite SNR) are skipped and recorded in
    dataset.skipped as (image_id, nv, stream, reason).
    """
    corpus = _normalize_corpus(clean_images)
    nv_grid = [float(v) for v in nv_grid]
    if not corpus:
        raise ValueError("empty image corpus")
    if not nv_grid:
        raise ValueError("empty noise-variance grid")
    if seeds_per_level < 1:
        raise ValueError("seeds_per_level must be >= 1")

    cols: dict = {c: [] for c in _DATASET_COLUMNS}
    skipped: list = []
    stream = 0
    for image_id, clean in corpus:
        for nv in nv_grid:
            for _ in range(seeds_per_level):
                stream += 1
                noisy = add_awgn(clean, NoiseSpec(nv, seed=base_seed,
                                                  stream=stream))
                curve = compute_acf(noisy, usable_max_lag(noisy, max_lag))
                try:
                    est = snr_lsr(curve)
                except DegenerateAcfError as exc:
                    skipped.append((image_id, nv, stream, str(exc)))
                    continue
                if not math.isfinite(est.snr_db):
                    skipped.append((image_id, nv, stream,
                                    f"non-finite snr_db {est.snr_db!r}"))
                    continue
                cols["image_id"].append(image_id)
                cols["injected_nv"].append(nv)
                cols["noise_seed"].append(base_seed)
                cols["noise_stream"].append(stream)
                cols["snr_db"].append(est.snr_db)
                cols["snr_linear"].append(est.snr_linear)
                cols["acf0"].append(curve.value(0))
                cols["mean_sq"].append(curve.mean_sq)
                cols["acf1"].append(curve.value(1))
                cols["actual_snr_db"].append(actual_snr(clean, noisy).snr_db)

    return Dataset(
        image_ids=tuple(cols["image_id"]),
        injected_nv=np.asarray(cols["injected_nv"], dtype=np.float64),
        noise_seeds=np.asarray(cols["noise_seed"], dtype=np.uint64),
        noise_streams=np.asarray(cols["noise_stream"], dtype=np.int64),
        snr_db=np.asarray(cols["snr_db"], dtype=np.float64),
        snr_linear=np.asarray(cols["snr_linear"], dtype=np.float64),
        acf0=np.asarray(cols["acf0"], dtype=np.float64),
        mean_sq=np.asarray(cols["mean_sq"], dtype=np.float64),
        acf1=np.asarray(cols["acf1"], dtype=np.float64),
        actual_snr_db=np.asarray(cols["actual_snr_db"], dtype=np.float64),
        skipped=tuple(skipped),
    )


def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_DATASET_COLUMNS)
    for i in range(dataset.n_rows):
        writer.writerow([
            dataset.image_ids[i],
            repr(float(dataset.injected_nv[i])),
            int(dataset.noise_seeds[i]),
            int(dataset.noise_streams[i]),
            repr(float(dataset.snr_db[i])),
            repr(float(dataset.snr_linear[i])),
            repr(float(dataset.acf0[i])),
            repr(float(dataset.mean_sq[i])),
            repr(float(dataset.acf1[i])),
            repr(float(dataset.actual_snr_db[i])),
        ])
    return buf.getvalue()


def dataset_from_csv(text: str) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty dataset file")
    if tuple(header) != _DATASET_COLUMNS:
        raise DataError(f"unexpected dataset header {header!r}")
    cols: dict = {c: [] for c in _DATASET_COLUMNS}
    for row in reader:
        if not row:
            continue
        if len(row) != len(_DATASET_COLUMNS):
            raise DataError(f"dataset row has {len(row)} fields, "
                            f"expected {len(_DATASET_COLUMNS)}")
        for name, value in zip(_DATASET_COLUMNS, row):
            cols[name].append(value)
    try:
        return Dataset(
            image_ids=tuple(cols["image_id"]),
            injected_nv=np.asarray([float(v) for v in cols["injected_nv"]]),
            noise_seeds=np.asarray([int(v) for v in cols["noise_seed"]],
                                   dtype=np.uint64),
            noise_streams=np.asarray([int(v) for v in cols["noise_stream"]],
                                     dtype=np.int64),
            snr_db=np.asarray([float(v) for v in cols["snr_db"]]),
            snr_linear=np.asarray([float(v) for v in cols["snr_linear"]]),
            acf0=np.asarray([float(v) for v in cols["acf0"]]),
            mean_sq=np.asarray([float(v) for v in cols["mean_sq"]]),
            acf1=np.asarray([float(v) for v in cols["acf1"]]),
            actual_snr_db=np.asarray([float(v) for v in cols["actual_snr_db"]]),
        )
    except ValueError as exc:
        raise DataError(f"bad dataset value: {exc}")


# ---------------------------------------------------------------------------
# the trained pipeline

PIPELINE_FORMAT = "semdenoise-pipeline"
PIPELINE_VERSION = 1

DEFAULT_SNR_METHOD = "lsr"


@dataclass(frozen=True)
class PipelineModel:
    """Regressor plus the recipe for the features it expects."""

    regressor: object
    feature_spec: str = "snr_db"
    snr_method: str = DEFAULT_SNR_METHOD
    version: int = PIPELINE_VERSION

    def __post_init__(self):
        feature_columns(self.feature_spec)  # validates
        if self.snr_method not in METHODS:
            raise ValueError(f"snr_method must be one of {METHODS}")
        if isinstance(self.regressor, (TrainedGpr, TrainedSvr)):
            dim = self.regressor.inputs.shape[1] if isinstance(
                self.regressor, TrainedGpr) else self._svr_dim()
            want = len(feature_columns(self.feature_spec))
            if dim != want:
                raise ValueError(
                    f"regressor expects {dim} features but spec "
                    f"{self.feature_spec!r} provides {want}")
        elif not callable(self.regressor):
            raise ValueError("regressor must be a trained model or callable")

    def _svr_dim(self) -> int:
        sv = self.regressor.support_vectors
        return sv.shape[1] if sv.size else len(feature_columns(self.feature_spec))


def _predict_nv(regressor, features: np.ndarray) -> float:
    if isinstance(regressor, TrainedGpr):
        return gpr_predict(regressor, features)[0]
    if isinstance(regressor, TrainedSvr):
        return svr_predict(regressor, features)
    return float(regressor(features))


def pipeline_to_dict(model: PipelineModel) -> dict:
    if not isinstance(model.regressor, (TrainedGpr, TrainedSvr)):
        raise ValueError("only trained regressors are serializable")
    return {
        "format": PIPELINE_FORMAT,
        "version": model.version,
        "snr_method": model.snr_method,
        "feature_spec": model.feature_spec,
        "regressor": model_to_dict(model.regressor),
    }


def pipeline_from_dict(d: dict) -> PipelineModel:
    if d.get("format") != PIPELINE_FORMAT:
        raise DataError(f"not a pipeline model file (format {d.get('format')!r})")
    if d.get("version") != PIPELINE_VERSION:
        raise DataError(f"unsupported pipeline version {d.get('version')!r}")
    return PipelineModel(
        regressor=model_from_dict(d["regressor"]),
        feature_spec=d["feature_spec"],
        snr_method=d["snr_method"],
        version=d["version"],
    )


def save_pipeline(model: PipelineModel, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(pipeline_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_pipeline(path) -> PipelineModel:
    with open(path, "r", encoding="ascii") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"bad pipeline file: {exc}")
    return pipeline_from_dict(payload)


# ---------------------------------------------------------------------------
# training

# fixed comparison baseline: linear SVR with sane defaults, standardized
_SVR_BASELINE_CONFIG = {"kernel": "poly1", "box_constraint": 1.0,
                        "epsilon": 1e-4, "standardize": True}


@dataclass(frozen=True)
class TrainReport:
    """Per-model train/test metrics in the benchmark-table layout."""

    rows: tuple  # (model_name, split, RegressionMetrics)
    cv_rmse: float
    best_config: dict
    n_train: int
    n_test: int


@dataclass(frozen=True)
class TrainResult:
    model: PipelineModel
    report: TrainReport
    train_metrics: RegressionMetrics
    test_metrics: RegressionMetrics
    baseline_test_metrics: RegressionMetrics


def train_test_split(n: int, seed: int, train_fraction: float = 0.8):
    """Seeded shuffled index split; at least one row on each side."""
    if n < 2:
        raise ValueError("need at least 2 rows to split")
    rng = CounterRng(seed, stream=11)
    perm = np.argsort(rng.uniform(n), kind="stable")
    n_train = min(max(int(round(train_fraction * n)), 1), n - 1)
    return perm[:n_train].copy(), perm[n_train:].copy()


def train_pipeline(dataset: Dataset, tuning_budget: int = DEFAULT_TUNE_BUDGET,
                   seed: int = 0, feature_spec: str = "snr_db",
                   include_presets: bool = True) -> TrainResult:
    """Tune a GPR on an 80/20 split of the dataset and wrap it as a pipeline.

    The report carries train and test metrics for the tuned model, each
    fixed-kernel preset, and a linear-SVR baseline, one row per (model, split).
    """
    if dataset.n_rows < 50:
        raise ValueError(f"need at least 50 dataset rows, have {dataset.n_rows}")
    X = dataset.features(feature_spec)
    y = dataset.labels()
    train_idx, test_idx = train_test_split(dataset.n_rows, seed)
    X_tr, y_tr = X[train_idx], y[train_idx]
    X_te, y_te = X[test_idx], y[test_idx]

    tuned = tune_optimizable_gpr(X_tr, y_tr, budget=tuning_budget, seed=seed)
    rows: list = []

    def add_rows(name: str, predict):
        rows.append((name, "train", regression_metrics(y_tr, predict(X_tr))))
        rows.append((name, "test", regression_metrics(y_te, predict(X_te))))

    if include_presets:
        for config in gpr_preset_configs():
            preset = fit_gpr_config(X_tr, y_tr, config)
            add_rows(f"gpr_{config['kernel']}",
                     lambda Xq, m=preset: gpr_predict_batch(m, Xq)[0])
    baseline = fit_svm_config(X_tr, y_tr, _SVR_BASELINE_CONFIG)
    add_rows("svr_linear", lambda Xq: svr_predict_batch(baseline, Xq))
    add_rows("gpr_tuned", lambda Xq: gpr_predict_batch(tuned.model, Xq)[0])

    report = TrainReport(rows=tuple(rows), cv_rmse=tuned.cv_rmse,
                         best_config=dict(tuned.config),
                         n_train=len(train_idx), n_test=len(test_idx))
    by_name = {(name, split): m for name, split, m in rows}
    return TrainResult(
        model=PipelineModel(regressor=tuned.model, feature_spec=feature_spec),
        report=report,
        train_metrics=by_name[("gpr_tuned", "train")],
        test_metrics=by_name[("gpr_tuned", "test")],
        baseline_test_metrics=by_name[("svr_linear", "test")],
    )


def train_report_to_csv(report: TrainReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "split", "rmse", "mse", "r_squared", "mae"])
    for name, split, m in report.rows:
        writer.writerow([name, split, repr(m.rmse), repr(m.mse),
                         repr(m.r_squared), repr(m.mae)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# single-image run

@dataclass(frozen=True)
class RunReport:
    snr_db: float
    peak_estimate: float
    estimated_nv: float
    used_fallback: bool
    window: int
    seconds: dict


def run_aogprllsr(noisy: GrayImage, model: PipelineModel, window: int = 3,
                  max_lag: int = DEFAULT_MAX_LAG) -> tuple:
    """Estimate the noise variance of one image and Wiener-filter it.

    Estimator degeneracy (flat curve, non-finite SNR) falls back to the
    plain lag-zero-drop variance estimate and sets used_fallback.
    """
    seconds: dict = {}
    t0 = time.perf_counter()
    curve = compute_acf(noisy, usable_max_lag(noisy, max_lag))
    seconds["acf"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    snr_db = math.nan
    peak = math.nan
    used_fallback = False
    try:
        est = estimate_snr(curve, model.snr_method)
        if not math.isfinite(est.snr_db):
            raise DegenerateAcfError(f"non-finite snr_db {est.snr_db!r}")
        snr_db = est.snr_db
        peak = est.peak_estimate
        features = feature_vector(curve, est, model.feature_spec)
        nv = _predict_nv(model.regressor, features)
    except DegenerateAcfError:
        used_fallback = True
        nv = noise_variance_from_acf(curve, curve.value(1),
                                     noisy.height * noisy.width)
    nv = max(0.0, float(nv))
    seconds["estimate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    filtered = wiener_nv(noisy, FilterConfig(window=window, noise_variance=nv))
    seconds["filter"] = time.perf_counter() - t0

    report = RunReport(snr_db=snr_db, peak_estimate=peak, estimated_nv=nv,
                       used_fallback=used_fallback, window=window,
                       seconds=seconds)
    return filtered, report


def run_report_to_dict(report: RunReport) -> dict:
    return {
        "snr_db": report.snr_db,
        "peak_estimate": report.peak_estimate,
        "estimated_nv": report.estimated_nv,
        "used_fallback": report.used_fallback,
        "window": report.window,
        "seconds": dict(report.seconds),
    }


# ---------------------------------------------------------------------------
# SNR estimator benchmark

SNR_TABLE_COLUMNS = ("nv", "actual_db", "nn_db", "fol_db", "nnfol_db",
                     "nllsr_db", "lsr_db")

_METHOD_TO_COLUMN = {"nn": "nn_db", "fol": "fol_db", "nn_fol": "nnfol_db",
                     "nllsr": "nllsr_db", "lsr": "lsr_db"}


@dataclass(frozen=True)
class SnrBenchmark:
    level_table: tuple  # dict rows keyed by SNR_TABLE_COLUMNS
    ttests: dict  # method -> TTestReport (LSR |error| vs method |error|)
    n_rows: int
    n_skipped: int


def benchmark_snr(corpus, nv_grid, seeds_per_level: int, base_seed: int = 0,
                  max_lag: int = DEFAULT_MAX_LAG) -> SnrBenchmark:
    """Average actual and estimated SNR (dB) per noise level over the corpus.

    A sample where any estimator degenerates is dropped for all estimators so
    every per-level mean covers the same images. The paired t-tests compare
    per-level absolute errors of the least-squares estimator against each of
    the other four.
    """
    images = _normalize_corpus(corpus)
    nv_grid = [float(v) for v in nv_grid]
    if not images or not nv_grid:
        raise ValueError("need a nonempty corpus and noise grid")

    rows = []
    n_rows = 0
    n_skipped = 0
    stream = 0
    for nv in nv_grid:
        sums = {c: 0.0 for c in SNR_TABLE_COLUMNS[1:]}
        count = 0
        for _, clean in images:
            for _ in range(seeds_per_level):
                stream += 1
                noisy = add_awgn(clean, NoiseSpec(nv, seed=base_seed,
                                                  stream=stream))
                curve = compute_acf(noisy, usable_max_lag(noisy, max_lag))
                try:
                    sample = {}
                    for method in METHODS:
                        est = estimate_snr(curve, method)
                        if not math.isfinite(est.snr_db):
                            raise DegenerateAcfError(
                                f"{method}: non-finite snr_db")
                        sample[_METHOD_TO_COLUMN[method]] = est.snr_db
                except DegenerateAcfError:
                    n_skipped += 1
                    continue
                sample["actual_db"] = actual_snr(clean, noisy).snr_db
                for key, value in sample.items():
                    sums[key] += value
                count += 1
                n_rows += 1
        if count:
            row = {"nv": nv}
            row.update({c: sums[c] / count for c in SNR_TABLE_COLUMNS[1:]})
            rows.append(row)

    return SnrBenchmark(level_table=tuple(rows),
                        ttests=snr_error_ttests(rows),
                        n_rows=n_rows, n_skipped=n_skipped)


def snr_error_ttests(level_table) -> dict:
    """Paired t-tests on per-level |estimate - actual|, LSR vs each method.

    Needs at least two levels; returns {} otherwise (a t-test on one pair
    has no degrees of freedom).
    """
    rows = list(level_table)
    if len(rows) < 2:
        return {}
    actual = np.asarray([r["actual_db"] for r in rows])
    lsr_err = np.abs(np.asarray([r["lsr_db"] for r in rows]) - actual)
    out = {}
    for method in ("nn", "fol", "nn_fol", "nllsr"):
        col = _METHOD_TO_COLUMN[method]
        err = np.abs(np.asarray([r[col] for r in rows]) - actual)
        out[method] = paired_t_test(lsr_err, err)
    return out


def snr_table_to_csv(level_table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SNR_TABLE_COLUMNS)
    for row in level_table:
        writer.writerow([repr(float(row[c])) for c in SNR_TABLE_COLUMNS])
    return buf.getvalue()


def snr_table_from_csv(text: str) -> tuple:
    """Parse a benchmark table (the same layout snr_table_to_csv writes)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty benchmark table")
    if tuple(header) != SNR_TABLE_COLUMNS:
        raise DataError(f"unexpected benchmark header {header!r}")
    rows = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(SNR_TABLE_COLUMNS):
            raise DataError(f"benchmark row has {len(row)} fields")
        try:
            rows.append({c: float(v) for c, v in zip(SNR_TABLE_COLUMNS, row)})
        except ValueError as exc:
            raise DataError(f"bad benchmark value: {exc}")
    return tuple(rows)


# ---------------------------------------------------------------------------
# filter benchmark

GAUSSIAN_BASELINE_VARIANCE = 0.25  # mild fixed blur, sigma half a pixel
FIXED_WIENER_NV = 0.005  # mid-grid setting for the non-adaptive baseline

FILTER_TABLE_COLUMNS = ("nv", "mse_pre", "mse_post", "psnr_pre", "psnr_post",
                        "ssim_pre", "ssim_post")
COMPARISON_COLUMNS = ("nv", "mse_average", "mse_median", "mse_gaussian",
                      "mse_wiener_fixed", "mse_nv_guided")


@dataclass(frozen=True)
class BenchmarkRecord:
    """One corrupted image through the whole pipeline plus baselines."""

    image_id: str
    injected_nv: float
    actual_snr_db: float
    nn_db: float
    fol_db: float
    nnfol_db: float
    nllsr_db: float
    lsr_db: float
    estimated_nv: float
    mse_pre: float
    mse_post: float
    psnr_pre: float
    psnr_post: float
    ssim_pre: float
    ssim_post: float
    mse_average: float
    mse_median: float
    mse_gaussian: float
    mse_wiener_fixed: float
    failed: str | None = None


@dataclass(frozen=True)
class FilterBenchmark:
    records: tuple
    level_table: tuple  # dict rows keyed by FILTER_TABLE_COLUMNS
    comparison_table: tuple  # dict rows keyed by COMPARISON_COLUMNS
    ttest: TTestReport | None  # post vs pre MSE over levels
    n_failed: int


def _estimate_all_methods(curve: AcfCurve) -> dict:
    out = {}
    for method in METHODS:
        try:
            est = estimate_snr(curve, method)
            out[_METHOD_TO_COLUMN[method]] = est.snr_db
        except DegenerateAcfError:
            out[_METHOD_TO_COLUMN[method]] = math.nan
    return out


def benchmark_filters(corpus, nv_grid, seeds_per_level: int,
                      model: PipelineModel, base_seed: int = 0,
                      window: int = 3) -> FilterBenchmark:
    """Pipeline filtering quality per noise level, with fixed baselines.

    Baselines share the pipeline's window: box average, median, a fixed mild
    Gaussian blur, and the adaptive Wiener fed the constant mid-grid noise
    variance instead of the estimate.
    """
    images = _normalize_corpus(corpus)
    nv_grid = [float(v) for v in nv_grid]
    if not images or not nv_grid:
        raise ValueError("need a nonempty corpus and noise grid")

    cfg = FilterConfig(window=window)
    gauss_cfg = replace(cfg, noise_variance=GAUSSIAN_BASELINE_VARIANCE)
    fixed_cfg = replace(cfg, noise_variance=FIXED_WIENER_NV)

    records: list = []
    level_rows: list = []
    comparison_rows: list = []
    n_failed = 0
    stream = 10_000  # distinct from dataset-generation streams
    for nv in nv_grid:
        agg = {c: [] for c in FILTER_TABLE_COLUMNS[1:]}
        cmp_agg = {c: [] for c in COMPARISON_COLUMNS[1:]}
        for image_id, clean in images:
            for _ in range(seeds_per_level):
                stream += 1
                noisy = add_awgn(clean, NoiseSpec(nv, seed=base_seed,
                                                  stream=stream))
                curve = compute_acf(noisy, usable_max_lag(noisy))
                estimates = _estimate_all_methods(curve)
                filtered, report = run_aogprllsr(noisy, model, window=window)
                failed = ("estimator degenerate, lag-zero-drop fallback used"
                          if report.used_fallback else None)
                if failed:
                    n_failed += 1
                record = BenchmarkRecord(
                    image_id=image_id,
                    injected_nv=nv,
                    actual_snr_db=actual_snr(clean, noisy).snr_db,
                    estimated_nv=report.estimated_nv,
                    mse_pre=mse(noisy, clean),
                    mse_post=mse(filtered, clean),
                    psnr_pre=psnr(noisy, clean),
                    psnr_post=psnr(filtered, clean),
                    ssim_pre=ssim(noisy, clean),
                    ssim_post=ssim(filtered, clean),
                    mse_average=mse(average_filter(noisy, cfg), clean),
                    mse_median=mse(median_filter(noisy, cfg), clean),
                    mse_gaussian=mse(gaussian_filter(noisy, gauss_cfg), clean),
                    mse_wiener_fixed=mse(wiener_nv(noisy, fixed_cfg), clean),
                    failed=failed,
                    **estimates,
                )
                records.append(record)
                if failed:
                    continue
                for c in FILTER_TABLE_COLUMNS[1:]:
                    agg[c].append(getattr(record, c))
                cmp_agg["mse_average"].append(record.mse_average)
                cmp_agg["mse_median"].append(record.mse_median)
                cmp_agg["mse_gaussian"].append(record.mse_gaussian)
                cmp_agg["mse_wiener_fixed"].append(record.mse_wiener_fixed)
                cmp_agg["mse_nv_guided"].append(record.mse_post)
        if agg["mse_pre"]:
            row = {"nv": nv}
            row.update({c: float(np.mean(agg[c]))
                        for c in FILTER_TABLE_COLUMNS[1:]})
            level_rows.append(row)
            cmp_row = {"nv": nv}
            cmp_row.update({c: float(np.mean(cmp_agg[c]))
                            for c in COMPARISON_COLUMNS[1:]})
            comparison_rows.append(cmp_row)

    ttest = None
    if len(level_rows) >= 2:
        post = [r["mse_post"] for r in level_rows]
        pre = [r["mse_pre"] for r in level_rows]
        ttest = paired_t_test(post, pre)

    return FilterBenchmark(records=tuple(records),
                           level_table=tuple(level_rows),
                           comparison_table=tuple(comparison_rows),
                           ttest=ttest, n_failed=n_failed)


def _dict_rows_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(float(row[c])) for c in columns])
    return buf.getvalue()


def filter_table_to_csv(level_table) -> str:
    return _dict_rows_to_csv(level_table, FILTER_TABLE_COLUMNS)


def comparison_table_to_csv(comparison_table) -> str:
    return _dict_rows_to_csv(comparison_table, COMPARISON_COLUMNS)


def records_to_csv(records) -> str:
    columns = ("image_id", "injected_nv", "actual_snr_db", "nn_db", "fol_db",
               "nnfol_db", "nllsr_db", "lsr_db", "estimated_nv", "mse_pre",
               "mse_post", "psnr_pre", "psnr_post", "ssim_pre", "ssim_post",
               "mse_average", "mse_median", "mse_gaussian", "mse_wiener_fixed",
               "failed")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        writer.writerow([
            r.image_id,
            *[repr(float(getattr(r, c))) for c in columns[1:-1]],
            r.failed or "",
        ])
    return buf.getvalue()
