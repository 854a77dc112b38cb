import numpy as np
import pytest
from hypothesis import settings

from agma.data import synthesize_logistic, synthesize_quadratic
from agma.problems import Family, NodeDataset, ProblemInstance

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def central_difference(fun, theta, rel_step=1e-6):
    """Central finite differences with step ``rel_step * (1 + |theta_i|)``."""
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        h = rel_step * (1.0 + abs(theta[i]))
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (fun(up) - fun(down)) / (2.0 * h)
    return grad


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def strongly_convex_quadratic():
    return synthesize_quadratic(10, 100.0, N=100, seed=1)


@pytest.fixture(scope="session")
def small_quadratic():
    return synthesize_quadratic(5, 20.0, N=8, seed=3)


@pytest.fixture(scope="session")
def small_logistic():
    return synthesize_logistic(4, 1.0, N=6, seed=4, samples_per_node=5)


@pytest.fixture(scope="session")
def random_least_squares():
    r = np.random.default_rng(7)
    nodes = [NodeDataset(r.standard_normal((6, 3)), r.standard_normal(6)) for _ in range(4)]
    return ProblemInstance(nodes, Family.LEAST_SQUARES).with_constants()


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Record one ``PASS``/``FAIL`` line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def report(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} ({detail})"
        lines.append((number, line))
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
