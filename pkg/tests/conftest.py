import numpy as np
import pytest

from ipnn_opt.network import make_teacher
from ipnn_opt.reflect import AnnealingSchedule, optimize_network

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def teacher():
    """Teacher task used throughout: dims 16-16-16-10, 2000 samples, seed 0."""
    return make_teacher([16, 16, 16, 10], samples=2000, margin=0.05, seed=0)


@pytest.fixture(scope="session")
def optimized_teacher(teacher):
    net, _ = teacher
    results = optimize_network(net.layers, AnnealingSchedule(seed=0), "sa")
    return net.with_layers([r[0] for r in results])


@pytest.fixture
def accept():
    def record(name, ok, detail=""):
        _ACCEPTANCE.append((name, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
