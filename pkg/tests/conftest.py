"""Shared fixtures and the --runslow switch."""
import numpy as np
import pytest

from data_gen import SimDesign, generate
from dataset import Dataset


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte-Carlo studies")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def model_i_data():
    """Model I sample, n = 200 and p = 30."""
    sample = generate(SimDesign(model="I", n=200, p=30, seed=7), 0)
    return Dataset(X=sample.X, y=sample.y)


@pytest.fixture
def toy_csv(tmp_path):
    """Small CSV with a response column named y."""
    rng = np.random.default_rng(3)
    n = 40
    x1, x2 = rng.normal(size=n), rng.normal(size=n)
    y = 2.0 * x1 + rng.normal(size=n)
    path = tmp_path / "toy.csv"
    lines = ["x1,x2,y"] + [f"{a:.10f},{b:.10f},{c:.10f}" for a, b, c in zip(x1, x2, y)]
    path.write_text("\n".join(lines) + "\n")
    return path
