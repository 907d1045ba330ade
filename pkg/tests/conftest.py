from fractions import Fraction

import pytest

from plectic.linalg import Matrix, Subspace
from plectic.phi_modules import Rank2FPhi, tensor_induce


def line(*v):
    return Subspace([v], len(v))


def make_e1():
    return Rank2FPhi(5, 2, 0, Matrix.diag([1, 125]), line(1, 1))


def make_e2():
    return Rank2FPhi(5, 2, 0, Matrix.diag([2, 250]), line(1, 1))


@pytest.fixture
def e1():
    return make_e1()


@pytest.fixture
def e2():
    return make_e2()


@pytest.fixture
def t12():
    return tensor_induce([make_e1(), make_e2()])


def F(x):
    return Fraction(x)
