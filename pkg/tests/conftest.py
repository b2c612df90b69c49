import numpy as np
import pytest

from twistspec.config import build_preset
from twistspec.symbols import TridiagonalSymbol


@pytest.fixture(scope="session")
def fig1_symbol() -> TridiagonalSymbol:
    return TridiagonalSymbol.from_strings(d="i", b="1-2*x", c="i/4")


@pytest.fixture(scope="session")
def fig2_symbol() -> TridiagonalSymbol:
    return TridiagonalSymbol.from_strings(d="i/(x+1)", b="0", c="i/(x^2+100)")


@pytest.fixture(scope="session")
def ex4_symbol():
    return build_preset("ex4")


@pytest.fixture(scope="session")
def ex5_symbol():
    return build_preset("ex5")


def random_tridiagonal(rng: np.random.Generator, n: int):
    from twistspec.build import BandedComplexMatrix

    def cplx(size):
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)

    return BandedComplexMatrix(
        n, 1, 1, {0: cplx(n), 1: cplx(n - 1), -1: cplx(n - 1)}
    )
