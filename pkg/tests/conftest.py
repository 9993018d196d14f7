"""Shared fixtures.

The trained pipeline is expensive (~10 s) and used by both the pipeline unit
tests and the acceptance suite, so it is built once per session. Everything
in it is seeded; the fixture is deterministic across runs.
"""

import pathlib

import pytest

from semdenoise.pipeline import generate_dataset, synthetic_corpus, train_pipeline

DATA_DIR = pathlib.Path(__file__).parent / "data"

NV_LEVELS = [round(0.001 * k, 10) for k in range(1, 11)]


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def nv_levels():
    return list(NV_LEVELS)


@pytest.fixture(scope="session")
def training_corpus():
    return synthetic_corpus(16, 96, 96, seed=0)


@pytest.fixture(scope="session")
def training_dataset(training_corpus):
    return generate_dataset(training_corpus, NV_LEVELS, 5, base_seed=1)


@pytest.fixture(scope="session")
def trained(training_dataset):
    return train_pipeline(training_dataset, tuning_budget=24, seed=1,
                          feature_spec="extended")
