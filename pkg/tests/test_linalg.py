from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from leekh.linalg import (BadCuts, Eliminator, RowMismatch, SparseMatrixQ, augmented_rank,
                          dense_rank, rank, rank_profile)

small = st.integers(-3, 3)
matrices = st.integers(1, 6).flatmap(
    lambda r: st.lists(st.lists(small, min_size=r, max_size=r), min_size=1, max_size=6)
    .map(lambda cols: [[cols[j][i] for j in range(len(cols))] for i in range(r)]))


def _det(m):
    # cofactor expansion: independent of any elimination code
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(len(m)))


def _minor_rank(rows):
    from itertools import combinations
    nr, nc = len(rows), len(rows[0])
    for k in range(min(nr, nc), 0, -1):
        for rs in combinations(range(nr), k):
            for cs in combinations(range(nc), k):
                if _det([[rows[r][c] for c in cs] for r in rs]):
                    return k
    return 0


@given(matrices)
def test_rank_matches_minors(rows):
    assert rank(SparseMatrixQ.from_dense(rows)) == _minor_rank(rows) == dense_rank(rows)


@given(matrices)
def test_transpose_preserves_rank(rows):
    M = SparseMatrixQ.from_dense(rows)
    assert rank(M.transpose()) == rank(M)
    assert M.transpose().transpose().to_dense() == M.to_dense()


@given(matrices)
def test_rank_profile_is_prefix_rank(rows):
    M = SparseMatrixQ.from_dense(rows)
    cuts = list(range(M.cols + 1))
    prof = rank_profile(M, cuts)
    for c, r in zip(prof.cuts, prof.ranks):
        prefix = [row[:c] for row in rows]
        assert r == (dense_rank(prefix) if c else 0)


def test_eliminator_membership_and_reduce():
    E = Eliminator()
    assert E.add({0: 1, 1: 1})
    assert not E.add({0: 2, 1: 2})
    assert E.contains({0: Fraction(-1, 3), 1: Fraction(-1, 3)})
    assert not E.contains({0: 1})
    r = E.reduce({0: 1, 1: 1})
    assert not any(r.values())


def test_augmented_rank_and_errors():
    A = SparseMatrixQ.from_dense([[1, 0], [0, 0]])
    B = SparseMatrixQ.from_dense([[0], [1]])
    assert augmented_rank(A, B) == 2
    with pytest.raises(RowMismatch):
        augmented_rank(A, SparseMatrixQ.from_dense([[1]]))
    with pytest.raises(BadCuts):
        rank_profile(A, [2, 1])
    with pytest.raises(ValueError):
        SparseMatrixQ(1, 1, [[(0, 0)]])


def test_rank_consistency_on_real_complex():
    from leekh.complex import build_complex
    from leekh.diagram import parse_pd
    from leekh.homology import SmallComplex
    C = SmallComplex.from_graded(build_complex(parse_pd("X(4,2,5,1) X(8,6,1,5) X(6,3,7,4) X(2,7,3,8)")))
    ranks = {i: rank(C.matrix(i, gens)) for i, gens in C.by_degree.items()}
    for i, gens in C.by_degree.items():
        assert ranks[i] + ranks.get(i - 1, 0) <= len(gens)
        prof = rank_profile(C.matrix(i, gens), [len(gens)])
        assert prof.ranks[-1] == ranks[i]
