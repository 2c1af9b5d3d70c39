import math
import sys

import numpy as np
import pytest

from mosd.problems import REGISTRY, Problem, Region

SQRT3_4 = math.sqrt(3) / 4


@pytest.fixture
def cex():
    return REGISTRY["paper-counterexample"]


@pytest.fixture
def quad():
    return REGISTRY["scalar-quadratic"]


@pytest.fixture
def opposed():
    return REGISTRY["opposed-pair"]


@pytest.fixture
def rosen():
    return REGISTRY["rosenbrock-pair"]


def linear_problem(c, name="linear", wrong=0.0):
    """Single linear objective <c, x>; ``wrong`` perturbs the first gradient entry."""
    c = np.asarray(c, dtype=float)
    bump = np.zeros_like(c)
    bump[0] = wrong
    return Problem(
        name=name,
        n=c.size,
        m=1,
        fun=lambda x: np.array([c @ x]),
        jac=lambda x: (c + bump)[None, :],
        domain=Region.box(-10 * np.ones(c.size), 10 * np.ones(c.size)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split("] ")[1].split(".")[0])):
        terminalreporter.write_line(line)
