from fractions import Fraction

import pytest

from conftest import make_e1
from plectic.linalg import Matrix, Subspace
from plectic.phi_modules import Rank2FPhi, random_admissible_rank2, scramble, tensor_induce
from plectic.quadratic import (
    PreconditionError,
    QuadraticStructure,
    UnsupportedDegeneracy,
    classify_intertwiner,
    find_structure_preserving_isos,
    isotropic_lines_in_plane,
    make_tensor_lambda,
    middle_isotropic_planes,
)

SWAP = Matrix([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


@pytest.fixture
def q12(e1, e2):
    return make_tensor_lambda([e1, e2])


@pytest.fixture
def q11():
    return make_tensor_lambda([make_e1(), make_e1()])


def test_tensor_lambda_entries(q12):
    g = q12.gram
    assert g[0, 3] == 1 and g[1, 2] == -1
    assert g.T == g and g.rank() == 4
    nonzero = {(r, c) for r in range(4) for c in range(4) if g[r, c]}
    assert nonzero == {(0, 3), (3, 0), (1, 2), (2, 1)}


def test_twist_law(q12, q11):
    m = q12.module
    assert m.phi(1).T @ q12.gram @ m.phi(1) == q12.gram.scale(125)
    assert q12.twist_law_holds(1)
    # the second factor of T12 has determinant 500, not 5^3
    assert q12.scale_factor(2) == 500 and not q12.twist_law_holds(2)
    assert q11.twist_law_holds(1) and q11.twist_law_holds(2)


def test_isotropy(q12):
    assert all(q12.is_maximal_isotropic(f) for f in q12.module.fil_plus)
    assert not q12.is_isotropic(Subspace([(1, 0, 0, 1)], 4))


def test_form_validation(t12):
    with pytest.raises(ValueError):
        QuadraticStructure(t12, Matrix([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
    with pytest.raises(ValueError):
        QuadraticStructure(t12, Matrix.zeros(4, 4))
    with pytest.raises(ValueError):
        make_tensor_lambda([make_e1()])


def test_isotropic_lines_in_plane():
    hyperbolic = Matrix([[0, Fraction(1, 2)], [Fraction(1, 2), 0]])
    assert isotropic_lines_in_plane(hyperbolic) == sorted(
        [Subspace([(1, 0)], 2), Subspace([(0, 1)], 2)], key=Subspace.sort_key
    )
    assert isotropic_lines_in_plane(Matrix.identity(2)) == []
    assert len(isotropic_lines_in_plane(Matrix([[1, 0], [0, -4]]))) == 2
    with pytest.raises(ValueError):
        isotropic_lines_in_plane(Matrix([[1, 1], [1, 1]]))


def test_middle_isotropic_planes_are_the_partial_filtrations(q12):
    assert set(middle_isotropic_planes(q12)) == set(q12.module.fil_plus)


def test_classify_identity_and_rescaling(q12):
    for c in (1, 3, Fraction(-2, 7)):
        res = classify_intertwiner(q12, q12, Matrix.identity(4).scale(c))
        assert res.verdict == "Plectic" and res.filtration == "respects"


def test_classify_swap_on_equal_factors(q11):
    res = classify_intertwiner(q11, q11, SWAP)
    assert res.label == "AntiPlectic(1)" and res.filtration == "interchanges" and res.xi_forced


def test_composing_with_swap_flips_verdict(q11):
    for res in find_structure_preserving_isos(q11, q11):
        flipped = classify_intertwiner(q11, q11, res.witness @ SWAP)
        assert {res.verdict, flipped.verdict} == {"Plectic", "AntiPlectic"}


def test_classify_preconditions(q12):
    with pytest.raises(PreconditionError):
        classify_intertwiner(q12, q12, Matrix.zeros(4, 4))
    with pytest.raises(PreconditionError):
        classify_intertwiner(q12, q12, Matrix([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
    # commutes with Frobenius but does not scale the form
    with pytest.raises(PreconditionError):
        classify_intertwiner(q12, q12, Matrix.diag([1, 2, 3, 4]))


def test_t12_classes(q12):
    labels = [(r.label, r.filtration) for r in find_structure_preserving_isos(q12, q12)]
    assert labels == [("Plectic", "respects"), ("AntiPlectic(1/2)", "interchanges")]


def test_equal_factor_classes(q11):
    res = find_structure_preserving_isos(q11, q11)
    assert [(r.label, r.filtration) for r in res] == [("Plectic", "respects"), ("AntiPlectic(1)", "interchanges")]
    assert res[0].witness == Matrix.identity(4)


def test_four_distinct_products_unique_plectic():
    f1 = random_admissible_rank2(1, 5, 2, 0)
    f2 = random_admissible_rank2(2, 5, 4, -1)
    q = make_tensor_lambda([f1, f2])
    res = find_structure_preserving_isos(q, q)
    assert [(r.label, r.filtration) for r in res] == [("Plectic", "respects")]


def test_scrambled_source_gives_same_classes(q11):
    s, P = scramble(q11.module, 5)
    qs = q11.transport(s, P)
    assert qs.twist_law_holds(1) and qs.twist_law_holds(2)
    res = find_structure_preserving_isos(qs, q11)
    assert [(r.label, r.filtration) for r in res] == [("Plectic", "respects"), ("AntiPlectic(1)", "interchanges")]


def test_minus_one_ratio_is_unsupported():
    f = Rank2FPhi(5, 1, 0, Matrix.diag([5, -5]), Subspace([(1, 1)], 2))
    q = QuadraticStructure(tensor_induce([f, f]), make_tensor_lambda([f, f]).gram)
    with pytest.raises(UnsupportedDegeneracy):
        find_structure_preserving_isos(q, q)
