import numpy as np
import pytest
from hypothesis import strategies as st

from app.schemas.structure import NonUnimodularStructure, UnimodularStructure


def uni(c1, c2, c3) -> UnimodularStructure:
    return UnimodularStructure(c1=c1, c2=c2, c3=c3)


def nonuni(alpha, beta) -> NonUnimodularStructure:
    return NonUnimodularStructure(alpha=alpha, beta=beta)


constants = st.floats(min_value=-5, max_value=5, allow_nan=False)
parameters = st.floats(min_value=0, max_value=3, allow_nan=False)

unimodular_structures = st.builds(uni, constants, constants, constants)
nonunimodular_structures = st.builds(nonuni, parameters, parameters)
structures = st.one_of(unimodular_structures, nonunimodular_structures)


@st.composite
def unit_vectors(draw):
    x = np.array(draw(st.lists(st.floats(min_value=-1, max_value=1), min_size=3, max_size=3)))
    norm = np.linalg.norm(x)
    if norm < 1e-3:
        return np.array([1.0, 0.0, 0.0])
    return x / norm


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def heisenberg():
    return uni(1, 0, 0)


@pytest.fixture
def sol():
    return uni(1, -1, 0)


def random_unimodular(rng, n):
    return [uni(*rng.uniform(-5, 5, size=3)) for _ in range(n)]


def random_nonunimodular(rng, n):
    return [nonuni(*rng.uniform(0, 3, size=2)) for _ in range(n)]


def random_unit(rng, n):
    X = rng.normal(size=(n, 3))
    return X / np.linalg.norm(X, axis=1, keepdims=True)
