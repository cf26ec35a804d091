import numpy as np
import pytest

from mxmap import Dataset, generate, get_preset


@pytest.fixture(scope="session")
def chain3():
    """Short noise-free three-variable chain x -> y -> z."""
    return generate(get_preset("3V_chain"), 800, seed=0)


@pytest.fixture(scope="session")
def chain4():
    return generate(get_preset("4V_chain"), 1500, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_dataset(rng, T=60, K=3):
    return Dataset.from_array(rng.normal(size=(T, K)), [f"s{i}" for i in range(K)])


@pytest.fixture(scope="session")
def chain3_long():
    """Long enough for pairwise mapping to pick up the x -> z shortcut."""
    return generate(get_preset("3V_chain"), 3500, seed=0)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance pass/fail lines at the end of the run."""
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.line(line)
