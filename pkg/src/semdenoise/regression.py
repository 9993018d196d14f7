"""Kernels, exact Gaussian-process regression, and epsilon-tube SVR.

Everything here is dense, exact, and small-data oriented: Gram matrices are
built in full, the GPR factorizes with Cholesky plus an escalating jitter
ridge, and the SVR solves its dual by pairwise coordinate ascent on the
maximal-violation pair. Models serialize to versioned JSON and reload to
bit-identical predictions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import FitError

KERNEL_FAMILIES = (
    "polynomial",
    "gaussian_rbf",
    "rational_quadratic",
    "squared_exponential",
    "matern52",
    "exponential",
    "ard_matern32",
)


@dataclass(frozen=True)
class KernelSpec:
    """One kernel family plus its parameters.

    polynomial            (scale * <x,y> + bias)^degree, degree in {1,2,3}
    gaussian_rbf          exp(-||x-y||^2 / (2 sigma^2))
    rational_quadratic    sigma_f^2 (1 + r^2/(2 alpha l^2))^(-alpha)
    squared_exponential   sigma_f^2 exp(-r^2 / (2 l^2))
    matern52              sigma_f^2 (1 + sqrt5 r/l + 5r^2/(3l^2)) exp(-sqrt5 r/l)
    exponential           sigma_f^2 exp(-r / l)
    ard_matern32          sigma_f^2 (1 + sqrt3 rho) exp(-sqrt3 rho),
                          rho^2 = sum_i (x_i-y_i)^2 / l_i^2   (per-dimension l)

    length may be a scalar (broadcast for ard) or a tuple of per-dimension
    scales for ard_matern32.
    """

    family: str
    degree: int = 3
    bias: float = 1.0
    scale: float = 1.0
    sigma: float = 1.0
    sigma_f: float = 1.0
    length: float | tuple[float, ...] = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "polynomial":
            if self.degree not in (1, 2, 3):
                raise ValueError("polynomial degree must be 1, 2 or 3")
            if self.scale <= 0.0:
                raise ValueError("polynomial scale must be positive")
            if self.bias < 0.0:
                raise ValueError("polynomial bias must be non-negative")
        elif self.family == "gaussian_rbf":
            if self.sigma <= 0.0:
                raise ValueError("rbf sigma must be positive")
        else:
            lv = np.atleast_1d(np.asarray(self.length, dtype=np.float64))
            if np.any(lv <= 0.0) or self.sigma_f <= 0.0:
                raise ValueError("length scales and sigma_f must be positive")
            if self.family == "rational_quadratic" and self.alpha <= 0.0:
                raise ValueError("rational_quadratic alpha must be positive")

    def length_vector(self, dim: int) -> np.ndarray:
        lv = np.atleast_1d(np.asarray(self.length, dtype=np.float64))
        if lv.size == 1:
            return np.full(dim, float(lv[0]))
        if lv.size != dim:
            raise ValueError(
                f"length-scale vector has {lv.size} entries for {dim} features"
            )
        return lv.astype(np.float64)


def _sq_dists(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    xx = np.sum(X * X, axis=1)[:, None]
    yy = np.sum(Y * Y, axis=1)[None, :]
    d2 = xx + yy - 2.0 * (X @ Y.T)
    return np.maximum(d2, 0.0)


def gram(spec: KernelSpec, X, Y) -> np.ndarray:
    """Kernel matrix k(X_i, Y_j) for row-stacked feature matrices."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"feature dims differ: {X.shape[1]} vs {Y.shape[1]}")
    fam = spec.family
    if fam == "polynomial":
        return (spec.scale * (X @ Y.T) + spec.bias) ** spec.degree
    if fam == "gaussian_rbf":
        return np.exp(-_sq_dists(X, Y) / (2.0 * spec.sigma**2))

    sf2 = spec.sigma_f**2
    if fam == "ard_matern32":
        ell = spec.length_vector(X.shape[1])
        rho = np.sqrt(_sq_dists(X / ell, Y / ell))
        s3r = math.sqrt(3.0) * rho
        return sf2 * (1.0 + s3r) * np.exp(-s3r)

    ell = spec.length_vector(X.shape[1])
    if ell.size > 1 and not np.all(ell == ell[0]):
        raise ValueError(f"{fam} takes a single shared length scale")
    l = float(ell[0])
    d2 = _sq_dists(X, Y)
    if fam == "rational_quadratic":
        return sf2 * (1.0 + d2 / (2.0 * spec.alpha * l * l)) ** (-spec.alpha)
    if fam == "squared_exponential":
        return sf2 * np.exp(-d2 / (2.0 * l * l))
    if fam == "matern52":
        r = np.sqrt(d2)
        s5r = math.sqrt(5.0) * r / l
        return sf2 * (1.0 + s5r + 5.0 * d2 / (3.0 * l * l)) * np.exp(-s5r)
    if fam == "exponential":
        return sf2 * np.exp(-np.sqrt(d2) / l)
    raise AssertionError(fam)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """k(x, y) for two single feature vectors."""
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    yv = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if xv.shape != yv.shape:
        raise ValueError(f"feature dims differ: {xv.shape} vs {yv.shape}")
    return float(gram(spec, xv[None, :], yv[None, :])[0, 0])


# ---------------------------------------------------------------------------
# feature standardization


@dataclass(frozen=True)
class Standardizer:
    """Per-column zero-mean/unit-std transform fitted on training rows.

    Constant columns are flagged and passed through unscaled (std kept at 1).
    """

    mean: np.ndarray
    std: np.ndarray
    constant_mask: np.ndarray


def standardize_fit(X) -> Standardizer:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] < 2:
        raise ValueError("standardization needs at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = std == 0.0
    safe_std = np.where(constant, 1.0, std)
    return Standardizer(mean=mean, std=safe_std, constant_mask=constant)


def standardize_apply(stats: Standardizer, x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    # constant columns keep their raw value
    return np.where(stats.constant_mask, a, (a - stats.mean) / stats.std)


# ---------------------------------------------------------------------------
# Gaussian-process regression

_JITTER_START = 1e-10
_JITTER_STOP = 1e-4


@dataclass(frozen=True)
class TrainedGpr:
    """Exact GPR posterior state (zero prior mean, raw targets)."""

    inputs: np.ndarray
    kernel: KernelSpec
    sigma_noise: float
    chol_factor: np.ndarray
    alpha_weights: np.ndarray
    standardizer: Standardizer | None
    jitter: float


def _chol_with_jitter(K: np.ndarray, sigma_noise: float) -> tuple[np.ndarray, float]:
    n = K.shape[0]
    base = float(np.trace(K)) / n
    if base <= 0.0:
        base = 1.0
    jitter = _JITTER_START * base
    stop = _JITTER_STOP * base
    eye = np.eye(n)
    while True:
        try:
            L = np.linalg.cholesky(K + (sigma_noise**2 + jitter) * eye)
            return L, jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > stop:
                raise FitError(
                    f"Cholesky failed even at maximal jitter {stop:.3e}"
                ) from None


def gpr_fit(X, y, kernel: KernelSpec, sigma_noise: float,
            basis: str = "none", standardize: bool = False) -> TrainedGpr:
    """Fit an exact GPR: factor K + (sigma_noise^2 + jitter) I, solve for weights.

    The prior mean is zero and targets are used as given, so predictions far
    from all training data revert to 0. Feature standardization is optional
    and recorded on the model.
    """
    if basis != "none":
        raise ValueError("only the zero-mean basis 'none' is supported")
    if sigma_noise < 0.0:
        raise ValueError("sigma_noise must be non-negative")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    yv = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != yv.size or X.shape[0] < 1:
        raise ValueError("X and y must have the same positive number of rows")
    stats = standardize_fit(X) if standardize else None
    Xs = standardize_apply(stats, X) if stats is not None else X
    K = gram(kernel, Xs, Xs)
    L, jitter = _chol_with_jitter(K, sigma_noise)
    alpha = np.linalg.solve(L.T, np.linalg.solve(L, yv))
    return TrainedGpr(inputs=Xs, kernel=kernel, sigma_noise=float(sigma_noise),
                      chol_factor=L, alpha_weights=alpha, standardizer=stats,
                      jitter=jitter)


def gpr_predict_batch(model: TrainedGpr, X) -> tuple[np.ndarray, np.ndarray]:
    """Posterior means and variances at many query points."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.inputs.shape[1]:
        raise ValueError(
            f"query dimension {X.shape[1]} != training dimension "
            f"{model.inputs.shape[1]}"
        )
    Xs = standardize_apply(model.standardizer, X) if model.standardizer else X
    k_star = gram(model.kernel, model.inputs, Xs)
    mean = k_star.T @ model.alpha_weights
    v = np.linalg.solve(model.chol_factor, k_star)
    k_xx = np.diag(gram(model.kernel, Xs, Xs)).copy()
    var = np.maximum(k_xx - np.sum(v * v, axis=0), 0.0)
    return mean, var


def gpr_predict(model: TrainedGpr, x) -> tuple[float, float]:
    """Posterior (mean, variance) at a single query point."""
    mean, var = gpr_predict_batch(model, np.atleast_1d(np.asarray(x, dtype=np.float64))[None, :])
    return float(mean[0]), float(var[0])


# ---------------------------------------------------------------------------
# epsilon-tube support vector regression

SVR_MAX_ITER = 100_000
_POLISH_EVERY = 1000


def _active_set_polish(K: np.ndarray, y: np.ndarray, beta: np.ndarray,
                       C: float, epsilon: float, max_rounds: int = 50):
    """Finish the dual ascent by solving the stationarity system exactly.

    Pair ascent identifies a near-optimal support set quickly but can zigzag
    for a long time on rank-deficient kernels, so we run a small active-set
    loop from its current state: solve the KKT equality conditions for the
    working set W (for each i in W with sign s_i, (K beta)_i + bias =
    y_i - epsilon * s_i, together with sum(beta) = 0), drop coefficients
    whose solved value flips sign, drop the worst offender when the equality
    system itself is inconsistent (a rank-deficient kernel cannot pin more
    working points than it has degrees of freedom), and pull in the worst
    remaining tube violator, until a round produces no changes. Coefficients
    pinned at the box stay fixed. The candidate is adopted only if it passes
    a full KKT check, so a wrong working set is rejected rather than
    absorbed.

    Returns (beta, bias, ok); on rejection the inputs come back unchanged.
    """
    n = y.size
    ktol = 1e-8 * max(1.0, float(np.max(np.abs(y))))
    bound = np.abs(beta) >= C
    bidx = np.flatnonzero(bound)
    signs = np.sign(beta) * ~bound  # working-set channel signs, 0 = inactive
    if not signs.any() or int(np.count_nonzero(signs)) > 150:
        return beta, 0.0, False
    fixed_sum = -float(beta[bidx].sum()) if bidx.size else 0.0

    candidate = None
    bias = 0.0
    for _ in range(max_rounds):
        idx = np.flatnonzero(signs)
        if idx.size == 0:
            return beta, 0.0, False
        s = signs[idx]
        rhs = y[idx] - epsilon * s
        if bidx.size:
            rhs = rhs - K[np.ix_(idx, bidx)] @ beta[bidx]
        m = idx.size
        system = np.zeros((m + 1, m + 1))
        system[:m, :m] = K[np.ix_(idx, idx)]
        system[:m, m] = 1.0
        system[m, :m] = 1.0
        sol, *_ = np.linalg.lstsq(system, np.concatenate([rhs, [fixed_sum]]),
                                  rcond=None)
        flipped = sol[:m] * s < 0.0
        if np.any(flipped):
            signs[idx[flipped]] = 0.0
            continue
        if np.any(np.abs(sol[:m]) > C):
            return beta, 0.0, False  # box entry is MVP's job, not ours
        candidate = np.zeros(n)
        candidate[bidx] = beta[bidx]
        candidate[idx] = sol[:m]
        candidate[idx] -= candidate.sum() / m  # exact sum-zero
        bias = float(sol[m])
        r = y - K @ candidate
        stationarity = np.abs(r[idx] - bias - epsilon * s)
        if float(np.max(stationarity)) > ktol:
            signs[idx[int(np.argmax(stationarity))]] = 0.0
            candidate = None
            continue
        outside = np.abs(r - bias) - epsilon
        outside[idx] = -np.inf  # working set is on the tube by construction
        outside[bidx] = -np.inf
        worst = int(np.argmax(outside))
        if outside[worst] <= ktol:
            break
        signs[worst] = np.sign(r[worst] - bias)
    else:
        return beta, 0.0, False

    if candidate is None:
        return beta, 0.0, False
    idx = np.flatnonzero(signs)
    if np.any(np.abs(candidate[idx]) > C) or np.any(
            candidate[idx] * signs[idx] < 0.0):
        return beta, 0.0, False
    r = y - K @ candidate
    at_upper = candidate >= C
    at_lower = candidate <= -C
    zero = (candidate == 0.0) & ~at_upper & ~at_lower
    ok = (
        bool(np.all(np.abs(r[idx] - bias - epsilon * signs[idx]) <= ktol))
        and bool(np.all(np.abs(r[zero] - bias) <= epsilon + ktol))
        and bool(np.all(r[at_upper] - bias >= epsilon - ktol))
        and bool(np.all(r[at_lower] - bias <= -epsilon + ktol))
    )
    if not ok:
        return beta, 0.0, False
    return candidate, bias, True


@dataclass(frozen=True)
class TrainedSvr:
    """Support vectors, net dual coefficients (alpha - alpha*), and bias."""

    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    kernel: KernelSpec
    epsilon_tube: float
    box_constraint: float
    standardizer: Standardizer | None
    converged: bool
    iterations: int


def svr_fit(X, y, kernel: KernelSpec, box_constraint: float, epsilon: float,
            standardize: bool = False, tol: float | None = None,
            max_iter: int = SVR_MAX_ITER) -> TrainedSvr:
    """Solve the epsilon-insensitive dual by maximal-violating-pair ascent.

    Net coefficients beta_i = alpha_i - alpha_i* live in [-C, C] and keep
    sum(beta) = 0 by construction (each step moves a matched pair). The
    stopping rule is the up/down KKT gap falling below tol (default 1e-3*C).
    Every _POLISH_EVERY sweeps the interior support set is handed to an
    exact KKT solve (see _active_set_polish), which typically terminates the
    ascent long before the gap rule does; hitting the iteration cap with
    neither rule satisfied leaves converged=False on the model.
    """
    C = float(box_constraint)
    if C <= 0.0:
        raise ValueError("box constraint must be positive")
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    yv = np.asarray(y, dtype=np.float64).ravel()
    n = X.shape[0]
    if n < 2 or yv.size != n:
        raise ValueError("need at least 2 rows with matching targets")
    if tol is None:
        tol = 1e-3 * C
    stats = standardize_fit(X) if standardize else None
    Xs = standardize_apply(stats, X) if stats is not None else X

    K = gram(kernel, Xs, Xs)
    diag = np.diag(K)
    beta = np.zeros(n)
    f = np.zeros(n)  # K @ beta, maintained incrementally
    converged = False
    iterations = 0
    polished_bias = None
    next_polish = _POLISH_EVERY

    for iterations in range(1, max_iter + 1):
        if iterations == next_polish:
            next_polish *= 2  # spaced out so rejected attempts stay cheap
            beta, bias_guess, ok = _active_set_polish(K, yv, beta, C, epsilon)
            if ok:
                polished_bias = bias_guess
                converged = True
                iterations -= 1
                break
        r = yv - f
        # raising beta_i uses the +eps channel when beta_i < 0 (shrinking
        # alpha*), the -eps channel otherwise; symmetrically for lowering
        up = np.where(beta < 0.0, r + epsilon,
                      np.where(beta < C, r - epsilon, -np.inf))
        low = np.where(beta > 0.0, r - epsilon,
                       np.where(beta > -C, r + epsilon, np.inf))
        i = int(np.argmax(up))
        j = int(np.argmin(low))
        gap = up[i] - low[j]
        if gap < tol:
            converged = True
            iterations -= 1
            break
        a = diag[i] + diag[j] - 2.0 * K[i, j]
        step = gap / max(a, 1e-12)
        # stay inside the box and stop at sign kinks (the tube term's slope
        # changes there); the next sweep re-selects if more progress remains
        cap_i = -beta[i] if beta[i] < 0.0 else C - beta[i]
        cap_j = beta[j] if beta[j] > 0.0 else C + beta[j]
        step = min(step, cap_i, cap_j)
        beta[i] += step
        beta[j] -= step
        f += step * (K[:, i] - K[:, j])

    np.clip(beta, -C, C, out=beta)

    if polished_bias is None:
        beta, bias_guess, ok = _active_set_polish(K, yv, beta, C, epsilon)
        if ok:
            polished_bias = bias_guess
            converged = True

    if polished_bias is not None:
        bias = polished_bias
    else:
        r = yv - f
        lower_active = (beta > 0.0) & (beta < C)
        upper_active = (beta < 0.0) & (beta > -C)
        candidates = np.concatenate([r[lower_active] - epsilon, r[upper_active] + epsilon])
        if candidates.size:
            bias = float(candidates.mean())
        else:
            up = np.where(beta < 0.0, r + epsilon,
                          np.where(beta < C, r - epsilon, -np.inf))
            low = np.where(beta > 0.0, r - epsilon,
                           np.where(beta > -C, r + epsilon, np.inf))
            hi = float(np.max(up))
            lo = float(np.min(low))
            if not math.isfinite(hi):
                bias = lo
            elif not math.isfinite(lo):
                bias = hi
            else:
                bias = 0.5 * (hi + lo)

    keep = beta != 0.0
    return TrainedSvr(
        support_vectors=Xs[keep].copy(),
        dual_coef=beta[keep].copy(),
        bias=bias,
        kernel=kernel,
        epsilon_tube=float(epsilon),
        box_constraint=C,
        standardizer=stats,
        converged=converged,
        iterations=iterations,
    )


def svr_predict_batch(model: TrainedSvr, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Xs = standardize_apply(model.standardizer, X) if model.standardizer else X
    if model.support_vectors.shape[0] == 0:
        return np.full(Xs.shape[0], model.bias)
    if Xs.shape[1] != model.support_vectors.shape[1]:
        raise ValueError(
            f"query dimension {Xs.shape[1]} != training dimension "
            f"{model.support_vectors.shape[1]}"
        )
    k = gram(model.kernel, model.support_vectors, Xs)
    return k.T @ model.dual_coef + model.bias


def svr_predict(model: TrainedSvr, x) -> float:
    return float(svr_predict_batch(model, np.atleast_1d(np.asarray(x, dtype=np.float64))[None, :])[0])


# ---------------------------------------------------------------------------
# quality metrics


@dataclass(frozen=True)
class RegressionMetrics:
    rmse: float
    mse: float
    r_squared: float
    mae: float


def regression_metrics(y_true, y_pred) -> RegressionMetrics:
    """rmse/mse/mae and r^2 about the mean of y_true."""
    yt = np.asarray(y_true, dtype=np.float64).ravel()
    yp = np.asarray(y_pred, dtype=np.float64).ravel()
    if yt.size == 0 or yt.shape != yp.shape:
        raise ValueError("need equal nonzero-length target vectors")
    res = yt - yp
    m = float(np.mean(res * res))
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        from .errors import DegenerateStatsError

        raise DegenerateStatsError("r_squared undefined for constant y_true")
    r2 = 1.0 - float(np.sum(res * res)) / ss_tot
    return RegressionMetrics(rmse=math.sqrt(m), mse=m,
                             r_squared=r2, mae=float(np.mean(np.abs(res))))


# ---------------------------------------------------------------------------
# serialization

MODEL_FORMAT = "semdenoise-model"
MODEL_VERSION = 1


def _kernel_to_dict(spec: KernelSpec) -> dict:
    d = {"family": spec.family}
    if spec.family == "polynomial":
        d.update(degree=spec.degree, bias=spec.bias, scale=spec.scale)
    elif spec.family == "gaussian_rbf":
        d.update(sigma=spec.sigma)
    else:
        length = spec.length
        d.update(
            sigma_f=spec.sigma_f,
            length=list(length) if isinstance(length, (tuple, list)) else length,
        )
        if spec.family == "rational_quadratic":
            d.update(alpha=spec.alpha)
    return d


def _kernel_from_dict(d: dict) -> KernelSpec:
    kwargs = dict(d)
    if isinstance(kwargs.get("length"), list):
        kwargs["length"] = tuple(kwargs["length"])
    return KernelSpec(**kwargs)


def _standardizer_to_dict(stats: Standardizer | None):
    if stats is None:
        return None
    return {
        "mean": stats.mean.tolist(),
        "std": stats.std.tolist(),
        "constant_mask": stats.constant_mask.astype(bool).tolist(),
    }


def _standardizer_from_dict(d) -> Standardizer | None:
    if d is None:
        return None
    return Standardizer(
        mean=np.asarray(d["mean"], dtype=np.float64),
        std=np.asarray(d["std"], dtype=np.float64),
        constant_mask=np.asarray(d["constant_mask"], dtype=bool),
    )


def model_to_dict(model) -> dict:
    """JSON-ready dict for a TrainedGpr or TrainedSvr."""
    if isinstance(model, TrainedGpr):
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "type": "gpr",
            "kernel": _kernel_to_dict(model.kernel),
            "sigma_noise": model.sigma_noise,
            "jitter": model.jitter,
            "inputs": model.inputs.tolist(),
            "alpha_weights": model.alpha_weights.tolist(),
            "standardizer": _standardizer_to_dict(model.standardizer),
        }
    if isinstance(model, TrainedSvr):
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "type": "svr",
            "kernel": _kernel_to_dict(model.kernel),
            "support_vectors": model.support_vectors.tolist(),
            "dual_coef": model.dual_coef.tolist(),
            "bias": model.bias,
            "epsilon_tube": model.epsilon_tube,
            "box_constraint": model.box_constraint,
            "standardizer": _standardizer_to_dict(model.standardizer),
            "converged": model.converged,
            "iterations": model.iterations,
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(d: dict):
    """Rebuild a trained model; the GPR refactorizes with its recorded jitter."""
    if d.get("format") != MODEL_FORMAT:
        raise ValueError("not a recognized model document")
    if d.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {d.get('version')}")
    kernel = _kernel_from_dict(d["kernel"])
    stats = _standardizer_from_dict(d.get("standardizer"))
    if d["type"] == "gpr":
        inputs = np.asarray(d["inputs"], dtype=np.float64)
        K = gram(kernel, inputs, inputs)
        ridge = d["sigma_noise"] ** 2 + d["jitter"]
        L = np.linalg.cholesky(K + ridge * np.eye(inputs.shape[0]))
        return TrainedGpr(
            inputs=inputs,
            kernel=kernel,
            sigma_noise=d["sigma_noise"],
            chol_factor=L,
            alpha_weights=np.asarray(d["alpha_weights"], dtype=np.float64),
            standardizer=stats,
            jitter=d["jitter"],
        )
    if d["type"] == "svr":
        sv = np.asarray(d["support_vectors"], dtype=np.float64)
        if sv.size == 0:
            sv = sv.reshape(0, 0)
        return TrainedSvr(
            support_vectors=sv,
            dual_coef=np.asarray(d["dual_coef"], dtype=np.float64),
            bias=d["bias"],
            kernel=kernel,
            epsilon_tube=d["epsilon_tube"],
            box_constraint=d["box_constraint"],
            standardizer=stats,
            converged=d["converged"],
            iterations=d["iterations"],
        )
    raise ValueError(f"unknown model type {d['type']!r}")


def save_model(model, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(model_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="ascii") as fh:
        return model_from_dict(json.load(fh))
