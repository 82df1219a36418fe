import numpy as np
import pytest

from src.benchmarks import build_kpp, build_logistic, build_phase_field
from src.poly_ode import PolyODE, PolyTerm


def random_ode(rng: np.random.Generator, n: int, degree: int, terms_per_degree: int = 3) -> PolyODE:
    terms = []
    for m in range(degree + 1):
        for _ in range(terms_per_degree):
            cols = tuple(int(c) for c in rng.integers(0, n, size=m))
            terms.append(PolyTerm(m, int(rng.integers(0, n)), cols, float(rng.uniform(-1, 1))))
    return PolyODE(n, degree, tuple(terms))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def logistic():
    return build_logistic()


@pytest.fixture
def kpp():
    return build_kpp()


@pytest.fixture
def phase_field():
    return build_phase_field()
