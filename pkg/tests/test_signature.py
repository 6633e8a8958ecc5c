from importlib import resources

import pytest
from hypothesis import given, strategies as st

from leekh.diagram import BraidWord, NotAKnot, from_braid
from leekh.signature import (braid_signature, knot_determinant, seifert_matrix,
                             symmetric_signature)
from leekh.diagram import load_table
from leekh.suites import random_knot_braid

from oracles import determinant_from_jones

knot_braids = st.randoms(use_true_random=False).map(lambda r: random_knot_braid(r, 4, 8))


def _table(name):
    with resources.as_file(resources.files("leekh") / "data" / name) as p:
        return load_table(p)


def test_positive_trefoil_signature():
    assert braid_signature(BraidWord(2, (1, 1, 1))) == 2
    assert braid_signature(BraidWord(2, (-1, -1, -1))) == -2
    assert braid_signature(BraidWord(3, (1, -2, 1, -2))) == 0


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_two_strand_torus_knots(n):
    assert braid_signature(BraidWord(2, (1,) * n)) == n - 1


@pytest.mark.parametrize("table", ["knots.csv", "small_knots.csv"])
def test_reference_signatures(table):
    for e in _table(table):
        if e.braid and e.sigma_ref is not None:
            assert braid_signature(e.braid_word()) == e.sigma_ref, e.name


@given(knot_braids)
def test_determinant_matches_jones_at_minus_one(w):
    assert knot_determinant(seifert_matrix(w)) == determinant_from_jones(from_braid(w))


@given(knot_braids)
def test_mirror_negates_signature(w):
    assert braid_signature(w.mirror()) == -braid_signature(w)


@given(knot_braids)
def test_seifert_matrix_is_unimodular_up_to_sign(w):
    # V - V^T has determinant 1 for a knot
    from leekh.signature import determinant
    from fractions import Fraction
    V = seifert_matrix(w)
    if V:
        A = [[Fraction(V[i][j] - V[j][i]) for j in range(len(V))] for i in range(len(V))]
        assert determinant(A) == 1


def test_links_are_rejected():
    with pytest.raises(NotAKnot):
        braid_signature(BraidWord(2, (1, 1)))
    with pytest.raises(NotAKnot):
        braid_signature(BraidWord(3, (1, 1, 1)))


def test_symmetric_signature_counts():
    from fractions import Fraction as F
    assert symmetric_signature([[F(0), F(1)], [F(1), F(0)]]) == (1, 1, 0)
    assert symmetric_signature([[F(2), F(0)], [F(0), F(0)]]) == (1, 0, 1)


@given(knot_braids)
def test_signature_is_even(w):
    assert braid_signature(w) % 2 == 0
