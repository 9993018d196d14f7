"""Bayesian optimization of regressor hyperparameters.

The search loop is the classic surrogate-model recipe: evaluate a seeded
space-filling design, fit a GPR surrogate to the (encoded config, objective)
pairs, then repeatedly propose the candidate that maximizes an acquisition
function over a fresh random pool. Objectives are minimized (cross-validated
RMSE throughout this package); failures count against the budget as +inf but
never enter the surrogate.

Config encoding: continuous dimensions map to [0, 1] (log-scaled ones through
log space), categicals one-hot. Objective values are standardized before the
surrogate fit, so the acquisition math runs on unit-scale numbers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .regression import (
    KernelSpec,
    TrainedGpr,
    TrainedSvr,
    gpr_fit,
    gpr_predict_batch,
    regression_metrics,
    svr_fit,
    svr_predict_batch,
)
from .rng import CounterRng

# ---------------------------------------------------------------------------
# acquisition functions

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


def _norm_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) * _INV_SQRT_2PI


def expected_improvement(mu: float, sigma: float, best: float) -> float:
    """Closed-form expected improvement below the incumbent best (minimization)."""
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    gap = best - mu
    if sigma == 0.0:
        return max(0.0, gap)
    z = gap / sigma
    return gap * _norm_cdf(z) + sigma * _norm_pdf(z)


def probability_of_improvement(mu: float, sigma: float, best: float,
                               margin: float = 0.0) -> float:
    """P(objective < best - margin) under the posterior; step function at sigma=0."""
    gap = best - margin - mu
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0.0:
        return 1.0 if gap > 0.0 else 0.0
    return _norm_cdf(gap / sigma)


def lcb_bound(mu: float, sigma: float) -> float:
    """Lower confidence envelope mu - 2*sigma."""
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    return mu - 2.0 * sigma


def lcb_acquisition(mu: float, sigma: float) -> float:
    """Score to maximize: 2*sigma - mu (the negated lower bound)."""
    return -lcb_bound(mu, sigma)


EIPS_TIME_FLOOR = 1e-3


def ei_per_second(ei: float, mu_time: float, floor: float = EIPS_TIME_FLOOR) -> float:
    """Expected improvement per predicted evaluation second, time floored."""
    return ei / max(mu_time, floor)


def posterior_quality_std(sigma_f: float, sigma_noise: float) -> float:
    """Total predictive std: sqrt(model-term variance + noise variance)."""
    return math.sqrt(sigma_f * sigma_f + sigma_noise * sigma_noise)


def plus_exploration_check(sigma_f: float, sigma_noise: float,
                           t_sigma: float = 0.5) -> bool:
    """True when the model-term std has collapsed below t_sigma * noise std.

    A true result is the trigger for inflating the surrogate's output scale
    so the search keeps exploring instead of polishing one basin.
    """
    if sigma_f < 0.0 or sigma_noise < 0.0 or t_sigma < 0.0:
        raise ValueError("inputs must be non-negative")
    return sigma_f < t_sigma * sigma_noise


# ---------------------------------------------------------------------------
# search space


@dataclass(frozen=True)
class ContinuousDim:
    name: str
    lo: float
    hi: float
    scale: str = "linear"  # or "log"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"{self.name}: lo must be < hi")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"{self.name}: scale must be linear or log")
        if self.scale == "log" and self.lo <= 0.0:
            raise ValueError(f"{self.name}: log scaling requires lo > 0")


@dataclass(frozen=True)
class CategoricalDim:
    name: str
    choices: tuple

    def __post_init__(self):
        if len(self.choices) < 1:
            raise ValueError(f"{self.name}: need at least one choice")


@dataclass(frozen=True)
class SearchSpace:
    dims: tuple

    def names(self) -> list[str]:
        return [d.name for d in self.dims]

    def encoded_width(self) -> int:
        return sum(len(d.choices) if isinstance(d, CategoricalDim) else 1
                   for d in self.dims)

    def encode(self, config: dict) -> np.ndarray:
        out: list[float] = []
        for d in self.dims:
            v = config[d.name]
            if isinstance(d, CategoricalDim):
                onehot = [0.0] * len(d.choices)
                onehot[d.choices.index(v)] = 1.0
                out.extend(onehot)
            elif d.scale == "log":
                out.append((math.log(v) - math.log(d.lo))
                           / (math.log(d.hi) - math.log(d.lo)))
            else:
                out.append((v - d.lo) / (d.hi - d.lo))
        return np.asarray(out, dtype=np.float64)

    def sample(self, rng: CounterRng, n: int, stratified: bool = False) -> list[dict]:
        """n random configs; stratified=True spreads continuous dims evenly."""
        configs = [dict() for _ in range(n)]
        for d in self.dims:
            if isinstance(d, CategoricalDim):
                picks = (rng.uniform(n) * len(d.choices)).astype(int)
                picks = np.minimum(picks, len(d.choices) - 1)
                for c, p in zip(configs, picks):
                    c[d.name] = d.choices[int(p)]
                continue
            u = rng.uniform(n)
            if stratified and n > 1:
                # one draw per stratum, visiting strata in shuffled order
                order = np.argsort(rng.uniform(n), kind="stable")
                u = (order + u) / n
            if d.scale == "log":
                vals = np.exp(math.log(d.lo) + u * (math.log(d.hi) - math.log(d.lo)))
            else:
                vals = d.lo + u * (d.hi - d.lo)
            for c, v in zip(configs, vals):
                c[d.name] = float(v)
        return configs


# ---------------------------------------------------------------------------
# k-fold cross-validation


def kfold_split(n: int, k: int, seed: int = 0) -> list[np.ndarray]:
    """Seeded shuffle of range(n) cut into k nearly equal folds."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if n < k:
        raise ValueError(f"cannot split {n} rows into {k} folds")
    rng = CounterRng(seed, stream=77)
    perm = np.argsort(rng.uniform(n), kind="stable")
    return [fold.copy() for fold in np.array_split(perm, k)]


def cross_validated_rmse(X, y, fit_fn, k: int = 5, seed: int = 0) -> float:
    """Pooled held-out RMSE over a seeded k-fold split.

    fit_fn(X_train, y_train) must return a callable mapping X_test to
    predictions. All held-out predictions are pooled into one vector before
    the RMSE is taken (not averaged per fold).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    yv = np.asarray(y, dtype=np.float64).ravel()
    folds = kfold_split(X.shape[0], k, seed)
    preds = np.empty_like(yv)
    for test_idx in folds:
        mask = np.ones(X.shape[0], dtype=bool)
        mask[test_idx] = False
        predict = fit_fn(X[mask], yv[mask])
        preds[test_idx] = np.asarray(predict(X[test_idx]), dtype=np.float64).ravel()
    return float(np.sqrt(np.mean((yv - preds) ** 2)))


# ---------------------------------------------------------------------------
# the optimization loop


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    config: dict
    objective: float
    incumbent: float


@dataclass(frozen=True)
class BayesOptResult:
    best_config: dict
    best_value: float
    trace: tuple


ACQUISITIONS = ("ei", "pi", "lcb", "eips")

DEFAULT_INIT_DESIGN = 5
DEFAULT_CANDIDATE_POOL = 2048

_SURROGATE_LENGTH = 0.25
_SURROGATE_NOISE = 1e-2


def _fit_surrogate(Z: np.ndarray, w: np.ndarray, sigma_f: float) -> TrainedGpr:
    kernel = KernelSpec(family="ard_matern32", sigma_f=sigma_f,
                        length=_SURROGATE_LENGTH)
    return gpr_fit(Z, w, kernel, sigma_noise=_SURROGATE_NOISE)


def bayes_optimize(objective, space: SearchSpace, budget: int,
                   acquisition: str = "ei", seed: int = 0,
                   init_design: int = DEFAULT_INIT_DESIGN,
                   candidate_pool: int = DEFAULT_CANDIDATE_POOL,
                   seed_configs: list[dict] | None = None) -> BayesOptResult:
    """Minimize a black-box objective over the search space.

    seed_configs are evaluated first, verbatim, before the space-filling
    remainder of the initial design; both count against the budget. The
    trace records every evaluation with the incumbent value after it.
    """
    if acquisition not in ACQUISITIONS:
        raise ValueError(f"acquisition must be one of {ACQUISITIONS}")
    if budget < 1:
        raise ValueError("budget must be at least 1")

    design: list[dict] = list(seed_configs or [])
    fill = init_design - len(design)
    if fill > 0:
        design.extend(space.sample(CounterRng(seed, 1), fill, stratified=True))
    design = design[:budget]

    pool_rng = CounterRng(seed, 2)
    trace: list[TraceEntry] = []
    evaluated: list[dict] = []
    values: list[float] = []
    seconds: list[float] = []
    best_value = math.inf
    best_config: dict | None = None

    def run_one(config: dict):
        nonlocal best_value, best_config
        t0 = time.perf_counter()
        try:
            value = float(objective(config))
            if not math.isfinite(value):
                value = math.inf
        except Exception:
            value = math.inf
        seconds.append(max(time.perf_counter() - t0, 1e-9))
        evaluated.append(config)
        values.append(value)
        if value < best_value:
            best_value = value
            best_config = config
        trace.append(TraceEntry(iteration=len(trace) + 1, config=config,
                                objective=value, incumbent=best_value))

    for config in design:
        run_one(config)

    while len(values) < budget:
        finite = [i for i, v in enumerate(values) if math.isfinite(v)]
        candidates = space.sample(pool_rng, candidate_pool)
        if not finite:
            run_one(candidates[0])
            continue
        Z = np.vstack([space.encode(evaluated[i]) for i in finite])
        w = np.asarray([values[i] for i in finite])
        w_mean = float(w.mean())
        w_std = float(w.std())
        if w_std == 0.0:
            w_std = 1.0
        w_s = (w - w_mean) / w_std

        sigma_f = 1.0
        surrogate = _fit_surrogate(Z, w_s, sigma_f)
        Zc = np.vstack([space.encode(c) for c in candidates])
        mu, var = gpr_predict_batch(surrogate, Zc)
        sig = np.sqrt(var)
        # exploration guard: if the model term has collapsed relative to the
        # observation noise, inflate the output scale once and refit
        if plus_exploration_check(float(np.median(sig)), _SURROGATE_NOISE):
            sigma_f *= 2.0
            surrogate = _fit_surrogate(Z, w_s, sigma_f)
            mu, var = gpr_predict_batch(surrogate, Zc)
            sig = np.sqrt(var)

        best_s = float(w_s.min())
        if acquisition == "lcb":
            scores = [lcb_acquisition(m, s) for m, s in zip(mu, sig)]
        elif acquisition == "pi":
            scores = [probability_of_improvement(m, s, best_s) for m, s in zip(mu, sig)]
        else:
            scores = [expected_improvement(m, s, best_s) for m, s in zip(mu, sig)]
            if acquisition == "eips":
                logt = np.log(np.asarray([seconds[i] for i in finite]))
                tmodel = _fit_surrogate(Z, logt - logt.mean(), 1.0)
                tmu, _ = gpr_predict_batch(tmodel, Zc)
                mu_time = np.exp(tmu + logt.mean())
                scores = [ei_per_second(e, t) for e, t in zip(scores, mu_time)]
        run_one(candidates[int(np.argmax(scores))])

    assert best_config is not None
    return BayesOptResult(best_config=best_config, best_value=best_value,
                          trace=tuple(trace))


def trace_to_csv(trace) -> str:
    """`iter,config_json,objective,incumbent` rows, properly quoted."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iter", "config_json", "objective", "incumbent"])
    for entry in trace:
        writer.writerow([
            entry.iteration,
            json.dumps(entry.config, sort_keys=True),
            repr(entry.objective),
            repr(entry.incumbent),
        ])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# regressor tuning spaces

GPR_KERNEL_CHOICES = (
    "rational_quadratic",
    "squared_exponential",
    "matern52",
    "exponential",
    "ard_matern32",
)

# fixed-kernel baselines: default hyperparameters, no standardization; also
# the verbatim head of the tuning run's initial design, so the tuned result
# can never lose to them on the same folds
GPR_PRESET_SIGMA_NOISE = 1e-3
GPR_PRESET_LENGTH = 4.0


def gpr_search_space() -> SearchSpace:
    return SearchSpace(dims=(
        CategoricalDim("kernel", GPR_KERNEL_CHOICES),
        ContinuousDim("sigma_noise", 1e-6, 1.0, "log"),
        ContinuousDim("length", 1e-2, 1e2, "log"),
        CategoricalDim("standardize", (False, True)),
    ))


def gpr_preset_configs() -> list[dict]:
    return [
        {"kernel": fam, "sigma_noise": GPR_PRESET_SIGMA_NOISE,
         "length": GPR_PRESET_LENGTH, "standardize": False}
        for fam in GPR_KERNEL_CHOICES
    ]


def _gpr_kernel_from_config(config: dict) -> KernelSpec:
    return KernelSpec(family=config["kernel"], sigma_f=1.0,
                      length=float(config["length"]))


def _gpr_fit_fn(config: dict):
    def fit(X, y):
        model = gpr_fit(X, y, _gpr_kernel_from_config(config),
                        sigma_noise=float(config["sigma_noise"]),
                        standardize=bool(config["standardize"]))
        return lambda Xq: gpr_predict_batch(model, Xq)[0]
    return fit


SVM_KERNEL_CHOICES = (
    "poly1", "poly2", "poly3", "rbf_fine", "rbf_medium", "rbf_coarse",
)


def svm_search_space() -> SearchSpace:
    return SearchSpace(dims=(
        CategoricalDim("kernel", SVM_KERNEL_CHOICES),
        ContinuousDim("box_constraint", 1e-3, 1e3, "log"),
        ContinuousDim("epsilon", 1e-6, 1e-1, "log"),
        CategoricalDim("standardize", (False, True)),
    ))


def _svm_kernel_from_config(config: dict, n_features: int) -> KernelSpec:
    name = config["kernel"]
    if name.startswith("poly"):
        return KernelSpec(family="polynomial", degree=int(name[-1]),
                          bias=1.0, scale=1.0)
    root_p = math.sqrt(float(n_features))
    sigma = {"rbf_fine": root_p / 4.0, "rbf_medium": root_p,
             "rbf_coarse": 4.0 * root_p}[name]
    return KernelSpec(family="gaussian_rbf", sigma=sigma)


def _svm_fit_fn(config: dict):
    def fit(X, y):
        model = svr_fit(X, y, _svm_kernel_from_config(config, X.shape[1]),
                        box_constraint=float(config["box_constraint"]),
                        epsilon=float(config["epsilon"]),
                        standardize=bool(config["standardize"]))
        return lambda Xq: svr_predict_batch(model, Xq)
    return fit


@dataclass(frozen=True)
class TunedRegressor:
    """Winner of a tuning run, refitted on all rows."""

    model: object
    cv_rmse: float
    config: dict
    result: BayesOptResult = field(repr=False)


DEFAULT_TUNE_BUDGET = 24


def tune_optimizable_gpr(X, y, budget: int = DEFAULT_TUNE_BUDGET, seed: int = 0,
                         k: int = 5, acquisition: str = "ei") -> TunedRegressor:
    """Cross-validated GPR hyperparameter search; refits the winner on all rows."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    yv = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] < 10:
        raise ValueError("tuning needs at least 10 rows")

    def objective(config):
        return cross_validated_rmse(X, yv, _gpr_fit_fn(config), k=k, seed=seed)

    presets = gpr_preset_configs()[:budget]
    result = bayes_optimize(objective, gpr_search_space(), budget,
                            acquisition=acquisition, seed=seed,
                            init_design=max(DEFAULT_INIT_DESIGN, len(presets)),
                            seed_configs=presets)
    config = result.best_config
    model = gpr_fit(X, yv, _gpr_kernel_from_config(config),
                    sigma_noise=float(config["sigma_noise"]),
                    standardize=bool(config["standardize"]))
    return TunedRegressor(model=model, cv_rmse=result.best_value,
                          config=config, result=result)


def tune_optimizable_svm(X, y, budget: int = DEFAULT_TUNE_BUDGET, seed: int = 0,
                         k: int = 5, acquisition: str = "ei") -> TunedRegressor:
    """Cross-validated SVR hyperparameter search; refits the winner on all rows."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    yv = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] < 10:
        raise ValueError("tuning needs at least 10 rows")

    def objective(config):
        return cross_validated_rmse(X, yv, _svm_fit_fn(config), k=k, seed=seed)

    result = bayes_optimize(objective, svm_search_space(), budget,
                            acquisition=acquisition, seed=seed)
    config = result.best_config
    model = svr_fit(X, yv, _svm_kernel_from_config(config, X.shape[1]),
                    box_constraint=float(config["box_constraint"]),
                    epsilon=float(config["epsilon"]),
                    standardize=bool(config["standardize"]))
    return TunedRegressor(model=model, cv_rmse=result.best_value,
                          config=config, result=result)


def fit_gpr_config(X, y, config: dict) -> TrainedGpr:
    """Fit a GPR from an explicit tuning-space config (no search)."""
    return gpr_fit(np.atleast_2d(np.asarray(X, dtype=np.float64)),
                   np.asarray(y, dtype=np.float64).ravel(),
                   _gpr_kernel_from_config(config),
                   sigma_noise=float(config["sigma_noise"]),
                   standardize=bool(config["standardize"]))


def fit_svm_config(X, y, config: dict) -> TrainedSvr:
    """Fit an SVR from an explicit tuning-space config (no search)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return svr_fit(X, np.asarray(y, dtype=np.float64).ravel(),
                   _svm_kernel_from_config(config, X.shape[1]),
                   box_constraint=float(config["box_constraint"]),
                   epsilon=float(config["epsilon"]),
                   standardize=bool(config["standardize"]))
