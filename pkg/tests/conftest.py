# tests/conftest.py
# Version: 1.0.0

import os
import sys

import numpy as np
import pytest

# Projektverzeichnis zum Suchpfad hinzufügen
project_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_dir not in sys.path:
    sys.path.insert(0, project_dir)
tests_dir = os.path.dirname(os.path.abspath(__file__))
if tests_dir not in sys.path:
    sys.path.insert(0, tests_dir)

import helpers  # noqa: E402
from pgm_bench.core import get_config  # noqa: E402
from pgm_bench.infer import sample_dataset  # noqa: E402
from pgm_bench.logging_config import logger  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch, tmp_path):
    """Jeder Test startet mit den eingebauten Standardwerten"""
    monkeypatch.setenv("PGM_CONFIG", str(tmp_path / "missing-config.yaml"))
    monkeypatch.delenv("PGM_THREADS", raising=False)
    get_config(reload=True)
    logger.set_level("WARNING")
    yield
    logger.set_level("WARNING")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def asia():
    return helpers.asia_network()


@pytest.fixture
def serial():
    return helpers.serial_network()


@pytest.fixture
def converging():
    return helpers.converging_network()


@pytest.fixture(scope="session")
def converging_data():
    return sample_dataset(helpers.converging_network(), 5000, seed=7)


@pytest.fixture(scope="session")
def serial_data():
    return sample_dataset(helpers.serial_network(), 5000, seed=11)


@pytest.fixture(scope="session")
def marks():
    return helpers.marks_like_data(n=300, seed=3)
