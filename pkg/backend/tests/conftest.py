"""
Shared fixtures
Settings are read once per process, so the environment is pinned before any
app module is imported.
"""

import json
import os

os.environ.setdefault("LAB_LOG_DIR", "")
os.environ.setdefault("LAB_THREADS", "2")

from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from app.sieve import build_sieve
from app.variance_ladder import VarianceProfile

settings.register_profile("lab", max_examples=100, deadline=None)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "lab"))

GOLDEN_DIR = Path(__file__).parent / "golden"


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="rewrite tests/golden/*.json from the current outputs",
    )


@pytest.fixture(scope="session")
def small_table():
    """Sieve up to 1e5 with small segments so segment boundaries get exercised"""
    return build_sieve(10**5, segment_size=2**12)


@pytest.fixture(scope="session")
def unit_profile():
    return VarianceProfile.from_variances(np.ones(10**4), label="unit")


def _match(expected, actual, where="$"):
    if isinstance(expected, dict):
        assert isinstance(actual, dict) and set(actual) == set(expected), f"keys differ at {where}"
        for key in expected:
            _match(expected[key], actual[key], f"{where}.{key}")
    elif isinstance(expected, list):
        assert isinstance(actual, list) and len(actual) == len(expected), f"length differs at {where}"
        for i, (e, a) in enumerate(zip(expected, actual)):
            _match(e, a, f"{where}[{i}]")
    elif isinstance(expected, float):
        assert actual == pytest.approx(expected, rel=1e-9), f"value differs at {where}"
    else:
        assert actual == expected, f"value differs at {where}"


@pytest.fixture
def golden(request):
    """
    Compare JSON data against tests/golden/<name>.json.
    Floats match to rel 1e-9. A missing file fails unless --update-golden is given.
    """
    update = request.config.getoption("--update-golden")

    def check(name: str, data) -> None:
        path = GOLDEN_DIR / f"{name}.json"
        if update:
            GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
            return
        if not path.exists():
            pytest.fail(f"golden file {path.name} is missing; run pytest --update-golden to create it")
        _match(json.loads(path.read_text(encoding="utf-8")), data)

    return check
