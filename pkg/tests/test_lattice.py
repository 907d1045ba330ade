import itertools
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plectic.lattice import (
    ClosureCapExceeded,
    build_filtration,
    closure_of,
    format_subset,
    graded_piece,
    is_distributive,
    lattice_closure,
    members,
    subset,
    three_lines_example,
)
from plectic.linalg import Subspace


def test_subset_helpers():
    assert subset([1, 3]) == 0b101
    assert members(0b110) == (2, 3)
    assert format_subset(0) == "{}"
    with pytest.raises(ValueError):
        subset([0])


def test_filtration_is_intersection_of_generators(t12):
    f = t12.filtration
    assert f[0] == Subspace.full(4)
    assert f[0b11] == Subspace([(1, 1, 1, 1)], 4)
    assert f[0b11] == f[0b01] & f[0b10]


def test_build_filtration_errors():
    with pytest.raises(ValueError):
        build_filtration([])
    with pytest.raises(ValueError):
        build_filtration([Subspace.full(2), Subspace.full(3)])
    with pytest.raises(ValueError):
        build_filtration([Subspace.full(1)] * 9)


def test_three_lines_not_distributive():
    res = is_distributive(three_lines_example())
    assert not res
    a, b, c = res.witness
    assert a & (b + c) != (a & b) + (a & c)


def test_two_lines_distributive():
    f = build_filtration([Subspace([(1, 0)], 2), Subspace([(0, 1)], 2)])
    assert is_distributive(f)


def test_tensor_induct_is_distributive_with_unit_graded_pieces(t12):
    assert is_distributive(t12.filtration)
    assert all(graded_piece(t12.filtration, s)[0] == 1 for s in range(4))


def test_closure_cap(monkeypatch):
    monkeypatch.setenv("PLECTIC_CLOSURE_CAP", "4")
    with pytest.raises(ClosureCapExceeded):
        lattice_closure(three_lines_example())


def test_closure_is_deterministic_and_closed():
    lat = lattice_closure(three_lines_example())
    assert [s.dim for s in lat.elements] == sorted(s.dim for s in lat.elements)
    elems = set(lat.elements)
    for a, b in itertools.product(lat.elements, repeat=2):
        assert a + b in elems and a & b in elems


def brute_distributive(spaces, n):
    lat = closure_of(spaces, n)
    return all(
        a & (b + c) == (a & b) + (a & c) for a, b, c in itertools.product(lat.elements, repeat=3)
    )


small_vec = st.tuples(*[st.integers(-2, 2)] * 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small_vec, min_size=1, max_size=2), min_size=1, max_size=3))
def test_distributivity_agrees_with_direct_triple_check(gens):
    spaces = [Subspace(g, 3) for g in gens]
    assert bool(is_distributive(build_filtration(spaces))) == brute_distributive(
        spaces + list(build_filtration(spaces).table.values()), 3
    )


def test_three_lines_fast():
    start = time.perf_counter()
    is_distributive(three_lines_example())
    assert time.perf_counter() - start < 1.0
