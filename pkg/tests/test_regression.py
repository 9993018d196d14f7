"""Kernels, exact GPR, epsilon-tube SVR, and model serialization."""

import math

import numpy as np
import pytest

from semdenoise.errors import DegenerateStatsError, FitError
from semdenoise.regression import (
    KernelSpec,
    gpr_fit,
    gpr_predict,
    gpr_predict_batch,
    gram,
    kernel_eval,
    load_model,
    model_to_dict,
    regression_metrics,
    save_model,
    standardize_apply,
    standardize_fit,
    svr_fit,
    svr_predict,
    svr_predict_batch,
)


# ---------------------------------------------------------------------------
# kernels

def test_kernel_hand_values():
    x, y = [1.0], [1.0]
    poly = KernelSpec("polynomial", degree=3, bias=1.0, scale=1.0)
    assert kernel_eval(poly, x, y) == pytest.approx(8.0, abs=1e-12)

    rbf = KernelSpec("gaussian_rbf", sigma=1.0)
    assert kernel_eval(rbf, [0.0], [1.0]) == pytest.approx(math.exp(-0.5), abs=1e-12)

    rq = KernelSpec("rational_quadratic", sigma_f=1.0, length=1.0, alpha=1.0)
    # r^2 = 2 -> (1 + 2/2)^-1 = 0.5
    assert kernel_eval(rq, [0.0, 0.0], [1.0, 1.0]) == pytest.approx(0.5, abs=1e-12)

    m52 = KernelSpec("matern52", sigma_f=2.0, length=3.0)
    assert kernel_eval(m52, [0.7], [0.7]) == pytest.approx(4.0, abs=1e-12)

    expk = KernelSpec("exponential", sigma_f=1.0, length=1.0)
    assert kernel_eval(expk, [0.0], [1.0]) == pytest.approx(math.exp(-1.0), abs=1e-12)

    m32 = KernelSpec("ard_matern32", sigma_f=1.0, length=1.0)
    s3 = math.sqrt(3.0)
    assert kernel_eval(m32, [0.0], [1.0]) == pytest.approx(
        (1.0 + s3) * math.exp(-s3), abs=1e-12)


def test_ard_per_dimension_lengths():
    spec = KernelSpec("ard_matern32", length=(1.0, 2.0))
    # rho^2 = 1/1 + 4/4 = 2
    rho = math.sqrt(2.0)
    expected = (1.0 + math.sqrt(3.0) * rho) * math.exp(-math.sqrt(3.0) * rho)
    assert kernel_eval(spec, [0.0, 0.0], [1.0, 2.0]) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError, match="length-scale"):
        kernel_eval(spec, [0.0, 0.0, 0.0], [1.0, 2.0, 3.0])


def test_kernel_validation():
    with pytest.raises(ValueError, match="unknown kernel"):
        KernelSpec("laplace")
    with pytest.raises(ValueError):
        KernelSpec("polynomial", degree=4)
    with pytest.raises(ValueError):
        KernelSpec("gaussian_rbf", sigma=0.0)
    with pytest.raises(ValueError):
        KernelSpec("squared_exponential", length=-1.0)
    with pytest.raises(ValueError):
        KernelSpec("rational_quadratic", alpha=0.0)
    # shared-length families reject per-dimension vectors
    with pytest.raises(ValueError, match="single shared length"):
        gram(KernelSpec("matern52", length=(1.0, 2.0)),
             [[0.0, 0.0]], [[1.0, 1.0]])


@pytest.mark.parametrize("family,kw", [
    ("polynomial", dict(degree=2)),
    ("gaussian_rbf", dict(sigma=0.8)),
    ("rational_quadratic", dict(alpha=1.5, length=0.9)),
    ("squared_exponential", dict(length=1.2)),
    ("matern52", dict(length=0.7)),
    ("exponential", dict(length=1.1)),
    ("ard_matern32", dict(length=(0.5, 1.5, 2.0))),
])
def test_gram_symmetric_psd(family, kw):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(12, 3))
    K = gram(KernelSpec(family, **kw), X, X)
    assert np.allclose(K, K.T, atol=1e-12)
    eigs = np.linalg.eigvalsh(K)
    assert eigs.min() > -1e-9


def test_standardizer():
    X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    stats = standardize_fit(X)
    Z = standardize_apply(stats, X)
    root32 = math.sqrt(3.0 / 2.0)
    assert Z[:, 0] == pytest.approx([-root32, 0.0, root32], abs=1e-12)
    # constant column is passed through untouched
    assert np.array_equal(Z[:, 1], X[:, 1])
    with pytest.raises(ValueError):
        standardize_fit([[1.0, 2.0]])


# ---------------------------------------------------------------------------
# GPR

def test_gpr_single_point_closed_form():
    model = gpr_fit([[0.0]], [1.0], KernelSpec("squared_exponential"),
                    sigma_noise=0.0)
    mean, var = gpr_predict(model, [1.0])
    # k*/k(0,0) and k(1,1) - k*^2/k(0,0) with unit prior variance
    assert mean == pytest.approx(math.exp(-0.5), abs=1e-6)
    assert var == pytest.approx(1.0 - math.exp(-1.0), abs=1e-6)


def test_gpr_interpolates_noise_free_data():
    x = np.linspace(0.0, 3.0, 8)[:, None]
    y = np.sin(x).ravel()
    model = gpr_fit(x, y, KernelSpec("squared_exponential", length=1.0),
                    sigma_noise=0.0)
    mean, var = gpr_predict_batch(model, x)
    assert np.max(np.abs(mean - y)) < 1e-8
    assert np.max(var) < 1e-6


def test_gpr_variance_bounds_everywhere():
    rng = np.random.default_rng(11)
    X = rng.uniform(-2, 2, size=(25, 2))
    y = np.sin(X[:, 0]) + 0.3 * X[:, 1]
    spec = KernelSpec("matern52", sigma_f=1.3, length=0.8)
    model = gpr_fit(X, y, spec, sigma_noise=0.05)
    Q = rng.uniform(-4, 4, size=(1000, 2))
    _, var = gpr_predict_batch(model, Q)
    prior = kernel_eval(spec, Q[0], Q[0])
    assert np.all(var >= 0.0)
    assert np.all(var <= prior + 1e-10)


def test_gpr_duplicate_rows_need_jitter():
    X = [[0.0], [0.0], [1.0]]
    y = [0.5, 0.5, 1.0]
    model = gpr_fit(X, y, KernelSpec("squared_exponential"), sigma_noise=0.0)
    assert model.jitter > 0.0
    mean, _ = gpr_predict(model, [0.0])
    assert mean == pytest.approx(0.5, abs=1e-3)


def test_gpr_reverts_to_zero_prior_mean():
    model = gpr_fit([[0.0]], [3.0], KernelSpec("squared_exponential"),
                    sigma_noise=0.0)
    mean, var = gpr_predict(model, [50.0])
    assert abs(mean) < 1e-12
    assert var == pytest.approx(1.0, abs=1e-10)


def test_gpr_standardized_features():
    # without scaling, a unit length on inputs spaced 100 apart makes every
    # cross-covariance vanish and the posterior collapses to the zero prior
    X = np.array([[100.0], [200.0], [300.0], [400.0]])
    y = np.array([1.0, 2.0, 3.0, 4.0])
    spec = KernelSpec("squared_exponential", length=1.0)
    raw = gpr_fit(X, y, spec, sigma_noise=1e-6)
    raw_mean, _ = gpr_predict(raw, [250.0])
    assert abs(raw_mean) < 1e-6

    scaled = gpr_fit(X, y, spec, sigma_noise=1e-6, standardize=True)
    mean, _ = gpr_predict(scaled, [250.0])
    assert mean == pytest.approx(2.5, abs=0.15)  # zero prior shrinks a touch


def test_gpr_validation():
    spec = KernelSpec("squared_exponential")
    with pytest.raises(ValueError):
        gpr_fit([[0.0]], [1.0], spec, sigma_noise=-0.1)
    with pytest.raises(ValueError):
        gpr_fit([[0.0], [1.0]], [1.0], spec, sigma_noise=0.1)
    with pytest.raises(ValueError, match="basis"):
        gpr_fit([[0.0]], [1.0], spec, sigma_noise=0.1, basis="linear")
    model = gpr_fit([[0.0, 1.0]], [1.0], spec, sigma_noise=0.1)
    with pytest.raises(ValueError, match="dimension"):
        gpr_predict(model, [1.0])


# ---------------------------------------------------------------------------
# SVR

def test_svr_recovers_exact_linear_map():
    rng = np.random.default_rng(3)
    X = rng.uniform(-1, 1, size=(40, 2))
    y = 2.0 * X[:, 0] - 0.7 * X[:, 1] + 0.3
    eps = 1e-4
    model = svr_fit(X, y, KernelSpec("polynomial", degree=1, bias=1.0),
                    box_constraint=10.0, epsilon=eps)
    pred = svr_predict_batch(model, X)
    assert np.max(np.abs(pred - y)) <= eps + 1e-6
    assert regression_metrics(y, pred).r_squared > 0.999
    assert model.converged


def test_svr_dual_feasibility():
    rng = np.random.default_rng(4)
    X = rng.uniform(-1, 1, size=(30, 1))
    y = np.sin(2.0 * X[:, 0])
    C = 0.5
    model = svr_fit(X, y, KernelSpec("gaussian_rbf", sigma=0.5),
                    box_constraint=C, epsilon=0.01)
    assert np.all(np.abs(model.dual_coef) <= C + 1e-12)
    assert abs(model.dual_coef.sum()) < 1e-10
    assert model.dual_coef.shape[0] == model.support_vectors.shape[0]


def test_svr_wide_tube_keeps_no_support_vectors():
    X = [[0.0], [1.0], [2.0], [3.0]]
    y = [0.01, -0.02, 0.015, 0.0]
    model = svr_fit(X, y, KernelSpec("gaussian_rbf", sigma=1.0),
                    box_constraint=1.0, epsilon=0.5)
    assert model.support_vectors.shape[0] == 0
    assert model.converged
    pred = svr_predict_batch(model, X)
    assert np.all(np.abs(pred - np.asarray(y)) <= 0.5 + 1e-9)


def test_svr_tiny_box_cubic_config_trains():
    # small box constraint with a cubic kernel on standardized features
    rng = np.random.default_rng(5)
    X = rng.uniform(0.0, 30.0, size=(60, 1))
    y = 0.011 - 0.0003 * X[:, 0] + 0.2e-5 * X[:, 0] ** 2
    model = svr_fit(X, y, KernelSpec("polynomial", degree=3, bias=1.0, scale=1.0),
                    box_constraint=0.0113, epsilon=4.02e-5, standardize=True)
    assert model.converged
    pred = svr_predict_batch(model, X)
    assert np.all(np.isfinite(pred))
    # tube + tiny box still has to track the trend direction
    assert regression_metrics(y, pred).r_squared > 0.5


def test_svr_validation():
    spec = KernelSpec("gaussian_rbf")
    with pytest.raises(ValueError):
        svr_fit([[0.0], [1.0]], [0.0, 1.0], spec, box_constraint=0.0, epsilon=0.1)
    with pytest.raises(ValueError):
        svr_fit([[0.0], [1.0]], [0.0, 1.0], spec, box_constraint=1.0, epsilon=-0.1)
    with pytest.raises(ValueError):
        svr_fit([[0.0]], [0.0], spec, box_constraint=1.0, epsilon=0.1)


# ---------------------------------------------------------------------------
# metrics

def test_regression_metrics_hand_values():
    m = regression_metrics([1.0, 2.0, 3.0], [1.0, 2.0, 4.0])
    assert m.mse == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert m.rmse == pytest.approx(math.sqrt(1.0 / 3.0), abs=1e-15)
    assert m.rmse**2 == pytest.approx(m.mse, rel=1e-12)
    assert m.mae == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert m.r_squared == pytest.approx(0.5, abs=1e-15)


def test_regression_metrics_edge_cases():
    y = np.array([1.0, -2.0, 3.0])
    m = regression_metrics(y, np.zeros(3))
    assert m.rmse == pytest.approx(math.sqrt(np.mean(y * y)), abs=1e-15)
    assert m.r_squared < 1.0
    with pytest.raises(DegenerateStatsError):
        regression_metrics([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        regression_metrics([1.0], [1.0, 2.0])


# ---------------------------------------------------------------------------
# serialization

def test_gpr_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(9)
    X = rng.uniform(-1, 1, size=(15, 3))
    y = X @ np.array([1.0, -0.5, 0.25])
    model = gpr_fit(X, y, KernelSpec("rational_quadratic", length=0.7, alpha=2.0),
                    sigma_noise=0.01, standardize=True)
    path = tmp_path / "gpr.json"
    save_model(model, path)
    loaded = load_model(path)
    Q = rng.uniform(-1, 1, size=(20, 3))
    m0, v0 = gpr_predict_batch(model, Q)
    m1, v1 = gpr_predict_batch(loaded, Q)
    assert np.array_equal(m0, m1)
    assert np.array_equal(v0, v1)


def test_svr_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(10)
    X = rng.uniform(-1, 1, size=(25, 2))
    y = np.cos(X[:, 0]) * X[:, 1]
    model = svr_fit(X, y, KernelSpec("gaussian_rbf", sigma=0.7),
                    box_constraint=2.0, epsilon=0.02)
    path = tmp_path / "svr.json"
    save_model(model, path)
    loaded = load_model(path)
    Q = rng.uniform(-1, 1, size=(20, 2))
    assert np.array_equal(svr_predict_batch(model, Q), svr_predict_batch(loaded, Q))
    assert loaded.converged == model.converged


def test_model_dict_names_its_kind():
    model = gpr_fit([[0.0], [1.0]], [0.0, 1.0],
                    KernelSpec("squared_exponential"), sigma_noise=0.1)
    d = model_to_dict(model)
    assert d["format"] == "semdenoise-model"
    assert d["type"] == "gpr"
    assert d["version"] == 1
