import random

import pytest

from plectic.complexes import (
    FiniteComplex,
    NotConcentrated,
    abstract_bgg,
    cohomology,
    factor_piece,
    fil_subcomplex,
    labeled_subcomplex,
    lattice_morphism_check,
    non_concentrated_example,
    upset_lattice,
)
from plectic.lattice import ClosureCapExceeded, is_distributive
from plectic.linalg import Matrix


def test_zero_differentials_give_terms():
    c = FiniteComplex(1, ((0,), (0, 1)), (Matrix.zeros(2, 1),))
    assert cohomology(c, 0)[0] == 1 and cohomology(c, 1)[0] == 2


def test_exact_two_term_complex():
    c = FiniteComplex(1, ((0,), (0,)), (Matrix([[1]]),))
    assert cohomology(c, 0)[0] == 0 and cohomology(c, 1)[0] == 0


def test_validation():
    with pytest.raises(ValueError):  # maps label {1} into label {}
        FiniteComplex(1, ((1,), (0,)), (Matrix([[1]]),))
    with pytest.raises(ValueError):  # d o d != 0
        FiniteComplex(1, ((0,), (0,), (0,)), (Matrix([[1]]), Matrix([[1]])))
    with pytest.raises(ValueError):
        FiniteComplex(1, ((2,),), ())


def test_d2_model_cohomology():
    c = abstract_bgg(2, 0)
    assert cohomology(c, 2)[0] == 4
    assert cohomology(c, 0)[0] == cohomology(c, 1)[0] == 0


def test_fil_subcomplex_shapes():
    c = abstract_bgg(2, 1)
    whole = fil_subcomplex(c, 0)
    assert [s.dim for s in whole.spaces] == list(c.dims)
    top = fil_subcomplex(c, 0b11)
    assert all(all(c.labels[n][k] == 0b11 for k in c.coords(n, 1 << 0b11)) for n in range(c.top + 1))
    assert cohomology(top, 2)[0] == 1
    assert cohomology(fil_subcomplex(c, 0b01), 2)[0] == 2


def test_factor_pieces():
    rng = random.Random(0)
    for kind in ("a", "b", "trivial"):
        c = factor_piece(kind, rng)
        assert cohomology(c, 1)[0] == 2
        assert cohomology(fil_subcomplex(c, 1), 1)[0] == 1
    with pytest.raises(ValueError):
        factor_piece("c", rng)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_euler_characteristic_and_exact_sequence(d):
    c = abstract_bgg(d, 10 + d)
    lattice = upset_lattice(d)
    h = {u: cohomology(labeled_subcomplex(c, u), d)[0] for u in lattice}
    for u in lattice:
        assert labeled_subcomplex(c, u).euler_characteristic() == (-1) ** d * h[u]
    for u in lattice:
        for v in lattice:
            if u & v:
                assert h[u & v] + h[u | v] == h[u] + h[v]


def test_abstract_bgg_top_cohomology_and_distributivity():
    for d in (1, 2, 3):
        c = abstract_bgg(d, d)
        assert cohomology(c, d)[0] == 2**d
        res = lattice_morphism_check(c, d)
        assert res and is_distributive(res.induced)


def test_abstract_bgg_is_deterministic():
    assert abstract_bgg(3, 9) == abstract_bgg(3, 9)
    with pytest.raises(ValueError):
        abstract_bgg(7, 0)


def test_d1_two_slot_complex():
    c = FiniteComplex(1, ((), (0, 1)), (Matrix.zeros(2, 0),))
    assert lattice_morphism_check(c, 1)


def test_non_concentrated_witness():
    res = lattice_morphism_check(non_concentrated_example(), 1)
    assert not res
    assert isinstance(res.witness, NotConcentrated)
    assert res.witness.degree == 0 and res.witness.dim == 1


def test_upset_lattice_sizes():
    # nonempty up-sets of the subsets of a d-element set
    assert [len(upset_lattice(d)) for d in (1, 2, 3)] == [2, 5, 19]


def test_upset_lattice_cap(monkeypatch):
    monkeypatch.setenv("PLECTIC_CLOSURE_CAP", "100")
    with pytest.raises(ClosureCapExceeded):
        upset_lattice(4)
