import math
import os
import shutil
import tempfile

import pytest
from fastapi.testclient import TestClient

from app.config import TrackerConfig
from app.main import app  # Import the FastAPI instance
from app.systems import hyperbola_homotopy


@pytest.fixture(scope="function")
def client():
    test_base_dir = tempfile.mkdtemp()
    test_runs_dir = os.path.join(test_base_dir, "runs")
    os.makedirs(test_runs_dir, exist_ok=True)

    # Point app to the test run store
    original_runs_dir = os.getenv("RUNS_DIR")
    os.environ["RUNS_DIR"] = test_runs_dir

    with TestClient(app) as test_client:
        yield test_client

    if original_runs_dir is None:
        os.environ.pop("RUNS_DIR", None)
    else:
        os.environ["RUNS_DIR"] = original_runs_dir

    shutil.rmtree(test_base_dir, ignore_errors=True)


@pytest.fixture(scope="function")
def cfg():
    return TrackerConfig()


@pytest.fixture(scope="function")
def hyperbola():
    """p = 0.1 hyperbola x^2 - (t - 1/2)^2 - 0.01 and its start value +sqrt(0.26)."""
    return hyperbola_homotopy(0.1), math.sqrt(0.26)


@pytest.fixture(scope="function")
def x2_minus_1_document():
    return {
        "variables": ["x"],
        "polynomials": [
            [
                {"coeff_re": 1.0, "exponents": [2]},
                {"coeff_re": -1.0, "exponents": [0]},
            ]
        ],
    }


@pytest.fixture(scope="function")
def hyperbola_document():
    return {
        "variables": ["x"],
        "polynomials": [
            [
                {"coeff_re": 1.0, "exponents": [2]},
                {"coeff_re": -1.0, "exponents": [0], "t_degree": 2},
                {"coeff_re": 1.0, "exponents": [0], "t_degree": 1},
                {"coeff_re": -0.26, "exponents": [0]},
            ]
        ],
        "starts": [[[math.sqrt(0.26), 0.0]], [[-math.sqrt(0.26), 0.0]]],
    }


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full benchmark sweeps; run with RUN_SLOW_TESTS=1")


def pytest_collection_modifyitems(config, items):
    if os.getenv("RUN_SLOW_TESTS", "0") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set RUN_SLOW_TESTS=1 to run the benchmark sweeps")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
