import numpy as np
import pytest

from scgt.states import bloch_qubit_family, depolarized_projective_povm


@pytest.fixture(scope="session")
def bloch():
    return bloch_qubit_family()


@pytest.fixture
def half_povm():
    return depolarized_projective_povm(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
