"""Acquisition functions, search spaces, and the tuning loop.

The expected-improvement closed form is checked against a Monte Carlo
estimate with antithetic draws, which is an independent oracle for the
Gaussian integral it evaluates.
"""

import csv
import io
import json
import math

import numpy as np
import pytest

from semdenoise.bayesopt import (
    CategoricalDim,
    ContinuousDim,
    SearchSpace,
    bayes_optimize,
    cross_validated_rmse,
    ei_per_second,
    expected_improvement,
    fit_gpr_config,
    gpr_preset_configs,
    kfold_split,
    lcb_acquisition,
    lcb_bound,
    plus_exploration_check,
    posterior_quality_std,
    probability_of_improvement,
    trace_to_csv,
    tune_optimizable_gpr,
    tune_optimizable_svm,
)
from semdenoise.regression import gpr_predict_batch
from semdenoise.rng import CounterRng


# ---------------------------------------------------------------------------
# acquisition functions

def test_ei_unit_case_closed_form():
    phi_cdf = 0.5 * (1.0 + math.erf(1.0 / math.sqrt(2.0)))
    phi_pdf = math.exp(-0.5) / math.sqrt(2.0 * math.pi)
    assert expected_improvement(0.0, 1.0, 1.0) == pytest.approx(
        phi_cdf + phi_pdf, abs=1e-15)
    assert expected_improvement(0.0, 1.0, 1.0) == pytest.approx(
        1.0833154705876863, abs=1e-12)


def test_ei_zero_sigma_is_hinge():
    assert expected_improvement(2.0, 0.0, 1.0) == 0.0
    assert expected_improvement(0.25, 0.0, 1.0) == 0.75
    with pytest.raises(ValueError):
        expected_improvement(0.0, -1.0, 1.0)


def test_ei_matches_monte_carlo():
    rng = np.random.default_rng(42)
    half = rng.standard_normal(500_000)
    z = np.concatenate([half, -half])  # antithetic million-sample draw
    for _ in range(50):
        mu = rng.uniform(-2.0, 2.0)
        sigma = rng.uniform(0.1, 2.0)
        best = rng.uniform(-2.0, 2.0)
        mc = np.maximum(best - (mu + sigma * z), 0.0).mean()
        assert expected_improvement(mu, sigma, best) == pytest.approx(mc, abs=1e-3)


def test_probability_of_improvement():
    phi1 = 0.5 * (1.0 + math.erf(1.0 / math.sqrt(2.0)))
    assert probability_of_improvement(0.0, 1.0, 1.0) == pytest.approx(phi1, abs=1e-15)
    assert probability_of_improvement(0.0, 1.0, 1.0, margin=1.0) == pytest.approx(0.5)
    assert probability_of_improvement(0.0, 0.0, 1.0) == 1.0
    assert probability_of_improvement(2.0, 0.0, 1.0) == 0.0


def test_lcb_and_eips():
    assert lcb_bound(1.0, 0.5) == 0.0
    assert lcb_acquisition(1.0, 0.5) == 0.0
    assert lcb_acquisition(0.0, 1.0) == 2.0
    assert ei_per_second(1.0, 2.0) == 0.5
    # the time floor keeps near-instant evaluations from dominating
    assert ei_per_second(1.0, 0.0) == pytest.approx(1000.0)


def test_exploration_trigger():
    assert posterior_quality_std(3.0, 4.0) == 5.0
    assert plus_exploration_check(0.4, 1.0) is True
    assert plus_exploration_check(0.6, 1.0) is False
    with pytest.raises(ValueError):
        plus_exploration_check(-0.1, 1.0)


# ---------------------------------------------------------------------------
# search space

def _toy_space():
    return SearchSpace(dims=(
        ContinuousDim("x", -1.0, 3.0),
        ContinuousDim("rate", 1e-4, 1.0, "log"),
        CategoricalDim("mode", ("a", "b", "c")),
    ))


def test_space_encoding():
    space = _toy_space()
    assert space.encoded_width() == 5
    z = space.encode({"x": 1.0, "rate": 1e-2, "mode": "b"})
    assert z[0] == pytest.approx(0.5)
    assert z[1] == pytest.approx(0.5)  # geometric midpoint of the log dim
    assert list(z[2:]) == [0.0, 1.0, 0.0]
    lo = space.encode({"x": -1.0, "rate": 1e-4, "mode": "a"})
    hi = space.encode({"x": 3.0, "rate": 1.0, "mode": "c"})
    assert lo[0] == 0.0 and lo[1] == 0.0
    assert hi[0] == 1.0 and hi[1] == 1.0


def test_space_sampling():
    space = _toy_space()
    configs = space.sample(CounterRng(5, stream=1), 64)
    assert len(configs) == 64
    for c in configs:
        assert -1.0 <= c["x"] <= 3.0
        assert 1e-4 <= c["rate"] <= 1.0
        assert c["mode"] in ("a", "b", "c")
    again = space.sample(CounterRng(5, stream=1), 64)
    assert configs == again


def test_stratified_sampling_covers_strata():
    space = SearchSpace(dims=(ContinuousDim("x", 0.0, 1.0),))
    configs = space.sample(CounterRng(3, stream=2), 8, stratified=True)
    strata = sorted(int(c["x"] * 8) for c in configs)
    assert strata == list(range(8))


def test_space_validation():
    with pytest.raises(ValueError):
        ContinuousDim("x", 2.0, 1.0)
    with pytest.raises(ValueError):
        ContinuousDim("x", -1.0, 1.0, "log")
    with pytest.raises(ValueError):
        ContinuousDim("x", 0.0, 1.0, "sqrt")
    with pytest.raises(ValueError):
        CategoricalDim("mode", ())


# ---------------------------------------------------------------------------
# cross-validation plumbing

def test_kfold_disjoint_cover():
    folds = kfold_split(400, 5, seed=3)
    assert [len(f) for f in folds] == [80] * 5
    merged = np.sort(np.concatenate(folds))
    assert np.array_equal(merged, np.arange(400))
    assert [f.tolist() for f in kfold_split(400, 5, seed=3)] == \
        [f.tolist() for f in folds]
    with pytest.raises(ValueError):
        kfold_split(10, 1)
    with pytest.raises(ValueError):
        kfold_split(3, 5)


def test_cv_rmse_zero_predictor_gives_rms():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 2))
    y = rng.normal(size=40)

    def fit_zero(Xtr, ytr):
        return lambda Xq: np.zeros(len(Xq))

    got = cross_validated_rmse(X, y, fit_zero, k=4, seed=0)
    assert got == pytest.approx(math.sqrt(np.mean(y * y)), rel=1e-12)


# ---------------------------------------------------------------------------
# optimization loop

def _quadratic_space():
    return SearchSpace(dims=(ContinuousDim("x", -1.0, 1.0),))


def test_optimizer_solves_quadratic():
    result = bayes_optimize(lambda c: (c["x"] - 0.3) ** 2,
                            _quadratic_space(), budget=30, seed=0)
    assert abs(result.best_config["x"] - 0.3) <= 0.05
    assert len(result.trace) == 30


def test_trace_bookkeeping():
    result = bayes_optimize(lambda c: (c["x"] - 0.3) ** 2,
                            _quadratic_space(), budget=12, seed=1)
    assert [e.iteration for e in result.trace] == list(range(1, 13))
    running = math.inf
    for e in result.trace:
        running = min(running, e.objective)
        assert e.incumbent == running
    assert result.best_value == running


def test_failed_evaluations_become_inf():
    def shaky(config):
        if config["x"] < 0.0:
            raise RuntimeError("boom")
        return config["x"]

    result = bayes_optimize(shaky, _quadratic_space(), budget=15, seed=2)
    objs = [e.objective for e in result.trace]
    assert math.inf in objs  # some probe fell in the broken half-space
    assert math.isfinite(result.best_value)
    assert result.best_config["x"] >= 0.0


def test_seed_configs_run_first_and_budget_trims():
    seeds = [{"x": 0.5}, {"x": -0.5}, {"x": 0.25}]
    result = bayes_optimize(lambda c: c["x"] ** 2, _quadratic_space(),
                            budget=2, seed=0, seed_configs=seeds)
    assert len(result.trace) == 2
    assert result.trace[0].config == {"x": 0.5}
    assert result.trace[1].config == {"x": -0.5}


@pytest.mark.parametrize("acq", ["ei", "pi", "lcb", "eips"])
def test_all_acquisitions_make_progress(acq):
    result = bayes_optimize(lambda c: (c["x"] - 0.3) ** 2,
                            _quadratic_space(), budget=30, seed=0,
                            acquisition=acq)
    assert abs(result.best_config["x"] - 0.3) <= 0.2


def test_optimizer_validation():
    with pytest.raises(ValueError, match="acquisition"):
        bayes_optimize(lambda c: 0.0, _quadratic_space(), 5, acquisition="ucb")
    with pytest.raises(ValueError, match="budget"):
        bayes_optimize(lambda c: 0.0, _quadratic_space(), 0)


def test_optimizer_deterministic():
    a = bayes_optimize(lambda c: (c["x"] + 0.4) ** 2, _quadratic_space(),
                       budget=18, seed=7)
    b = bayes_optimize(lambda c: (c["x"] + 0.4) ** 2, _quadratic_space(),
                       budget=18, seed=7)
    assert a.best_config == b.best_config
    assert [e.objective for e in a.trace] == [e.objective for e in b.trace]


def test_beats_median_random_search():
    objective = lambda c: (c["x"] - 0.3) ** 2
    space = _quadratic_space()
    tuned = bayes_optimize(objective, space, budget=20, seed=0).best_value
    random_bests = []
    for s in range(10):
        configs = space.sample(CounterRng(1000 + s, stream=0), 20)
        random_bests.append(min(objective(c) for c in configs))
    assert tuned <= float(np.median(random_bests))


def test_trace_csv_round_trips():
    result = bayes_optimize(lambda c: c["x"] ** 2, _quadratic_space(),
                            budget=6, seed=3)
    text = trace_to_csv(result.trace)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["iter", "config_json", "objective", "incumbent"]
    assert len(rows) == 7
    for row, entry in zip(rows[1:], result.trace):
        assert int(row[0]) == entry.iteration
        assert json.loads(row[1]) == entry.config
        assert float(row[2]) == entry.objective
        assert float(row[3]) == entry.incumbent


# ---------------------------------------------------------------------------
# regressor tuning

def _tuning_problem(n=60, seed=8):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2.0, 2.0, size=(n, 2))
    y = np.sin(X[:, 0]) + 0.5 * X[:, 1] ** 2 + 0.05 * rng.normal(size=n)
    return X, y


def test_tuned_gpr_never_loses_to_presets():
    X, y = _tuning_problem()
    tuned = tune_optimizable_gpr(X, y, budget=8, seed=0, k=5)
    assert math.isfinite(tuned.cv_rmse)
    for preset in gpr_preset_configs():
        def fit(Xtr, ytr, cfg=preset):
            model = fit_gpr_config(Xtr, ytr, cfg)
            return lambda Xq: gpr_predict_batch(model, Xq)[0]

        preset_rmse = cross_validated_rmse(X, y, fit, k=5, seed=0)
        assert tuned.cv_rmse <= preset_rmse + 1e-12
    # the refitted winner predicts sensibly on its own training data
    mean, _ = gpr_predict_batch(tuned.model, X)
    assert float(np.sqrt(np.mean((mean - y) ** 2))) < 0.5


def test_tune_svm_smoke():
    X, y = _tuning_problem(n=30, seed=9)
    tuned = tune_optimizable_svm(X, y, budget=6, seed=0, k=3)
    assert math.isfinite(tuned.cv_rmse)
    assert tuned.config["kernel"] in (
        "poly1", "poly2", "poly3", "rbf_fine", "rbf_medium", "rbf_coarse")
    assert len(tuned.result.trace) == 6


def test_tuners_need_ten_rows():
    X = np.zeros((5, 2))
    y = np.zeros(5)
    with pytest.raises(ValueError):
        tune_optimizable_gpr(X, y, budget=4)
    with pytest.raises(ValueError):
        tune_optimizable_svm(X, y, budget=4)
