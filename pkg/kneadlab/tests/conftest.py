import math

import pytest

from kneadlab.kneading import parse_word
from kneadlab.thurston import bisect_superstable

from .utils import clear_applications

GOLDEN_LOG = math.log((1.0 + math.sqrt(5.0)) / 2.0)


@pytest.fixture(scope="session")
def period3_parameter():
    """The superstable parameter of RLC at r = 2."""
    return bisect_superstable(2.0, parse_word("RLC"), (1.7, 1.8))


@pytest.fixture(scope="session")
def golden_log():
    return GOLDEN_LOG


@pytest.fixture(autouse=True)
def isolated_run(tmp_path, monkeypatch):
    """No stray config file, worker override or application singleton."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("KNEADLAB_WORKERS", raising=False)
    clear_applications()
    yield
    clear_applications()
