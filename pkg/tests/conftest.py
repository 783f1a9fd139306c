import numpy as np
import pytest

from hadamardlab import builtin_space, builtin_space_names

# Spaces are rebuilt per session, not per test: make_space reruns the
# curvature self-test each time, which adds up over hundreds of tests.


@pytest.fixture(scope="session")
def spaces() -> dict:
    return {name: builtin_space(name) for name in builtin_space_names()}


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20250817)
