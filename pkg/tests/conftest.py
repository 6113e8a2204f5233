import numpy as np
import pytest

from zeropack import ComplexPolynomial


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_poly(rng, n: int, scale: float = 1.0) -> ComplexPolynomial:
    return ComplexPolynomial(scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))
