import numpy as np
import pytest
from hypothesis import strategies as st

from spherical_gradient.potential import random_spec

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


@st.composite
def unit_vectors(draw, ambient=3):
    v = np.array(draw(st.lists(st.floats(-1, 1), min_size=ambient, max_size=ambient)))
    n = np.linalg.norm(v)
    if n < 1e-3:
        v = np.eye(ambient)[draw(st.integers(0, ambient - 1))]
        n = 1.0
    return v / n


@st.composite
def admissible_specs(draw, max_total=0.9, max_k=5):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_spec(np.random.default_rng(seed), max_k=max_k, max_total=max_total)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
