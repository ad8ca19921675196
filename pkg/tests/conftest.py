import numpy as np
import pytest

SQ2 = np.sqrt(2.0)
SQ3 = np.sqrt(3.0)


@pytest.fixture
def unit_norm_d3():
    """a1=e1, a2=e2, a3=[1,1,1]/sqrt(3)."""
    return np.column_stack([[1.0, 0, 0], [0, 1.0, 0], np.ones(3) / SQ3])


@pytest.fixture
def two_atom():
    """a1=[1,0], a2=[sqrt(2),sqrt(2)]: the non-unit-norm pair used for OMP."""
    return np.array([[1.0, SQ2], [0.0, SQ2]])


@pytest.fixture
def wedge():
    """Orthonormal a1, a2 with a3 bisecting them: not 2-neighbourly."""
    return np.array([[1.0, 0.0, 1 / SQ2], [0.0, 1.0, 1 / SQ2]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
