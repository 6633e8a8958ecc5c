"""Worked examples for each module, with hand-derived or reference values."""

import json
from fractions import Fraction

import pytest

from leekh.canonical import (ALPHA, BETA, canonical_generators, class_filtration_grading,
                             summand_split)
from leekh.cli import main
from leekh.cobordism import (Move, Movie, apply_move, check_canonical_transport, compose_movie,
                             faces, lee_isomorphism, parse_movie)
from leekh.complex import MapKind, Theory, build_complex, tqft_maps
from leekh.cube import EdgeKind, edges, oriented_vertex, resolve
from leekh.diagram import (ArcLabelUsedWrongNumberOfTimes, BraidWord, connected_sum, from_braid,
                           load_bundled_table, load_table, mirror, parse_pd)
from leekh.homology import (barnatan_decomposition, khovanov_homology, lee_filtration,
                            s_invariant, width)
from leekh.linalg import SparseMatrixQ, augmented_rank, rank, rank_profile
from leekh.signature import braid_signature, seifert_matrix, signature, symmetric_signature, _sym

from conftest import FIGURE_EIGHT, TREFOIL_RIGHT

TREFOIL = BraidWord(2, (1, 1, 1))
FIG8 = BraidWord(3, (1, -2, 1, -2))


def nonzero(d):
    return {k: v for k, v in d.items() if v}


# diagrams

def test_pd_examples():
    D = parse_pd("X(1,4,2,3)X(3,6,4,5)X(5,2,6,1)")
    assert D.num_crossings == 3 and D.is_knot()
    assert len(set(D.signs)) == 1 and abs(D.writhe) == 3
    U = parse_pd("")
    assert U.writhe == 0 and U.num_components == 1
    with pytest.raises(ArcLabelUsedWrongNumberOfTimes):
        parse_pd("X(1,4,2,3)X(1,4,2,3)")


def test_braid_examples():
    T = from_braid(TREFOIL)
    assert (T.n_plus, T.n_minus) == (3, 0)
    K = from_braid(BraidWord(2, (-1,)))
    assert K.num_crossings == 1 and K.writhe == -1
    assert from_braid(FIG8).writhe == 0
    M = mirror(T)
    assert (M.n_plus, M.n_minus) == (0, 3)
    assert mirror(M).signs == T.signs


def test_connected_sum_examples():
    T = from_braid(TREFOIL)
    assert sorted(connected_sum(parse_pd(""), T).signs) == sorted(T.signs)
    TT = connected_sum(T, T)
    assert TT.num_crossings == 6 and TT.writhe == 6
    TM = connected_sum(T, mirror(T))
    assert TM.num_crossings == 6 and TM.writhe == 0


def test_table_examples(tmp_path):
    entries = {e.name: e for e in load_bundled_table()}
    assert (entries["10_139"].sigma_ref, entries["10_139"].s_ref) == (6, 8)
    assert (entries["9_42"].sigma_ref, entries["9_42"].s_ref) == (2, 0)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert load_table(empty) == []


# resolution cube

def test_resolution_examples():
    T = from_braid(TREFOIL)
    assert resolve(T, 0).circle_count == 2
    assert resolve(T, 7).circle_count == 3
    assert resolve(parse_pd(""), 0).circle_count == 1
    assert oriented_vertex(T) == 0
    assert oriented_vertex(mirror(T)) == 7
    F = from_braid(FIG8)
    want = sum(1 << l for l, s in enumerate(F.signs) if s < 0)
    assert oriented_vertex(F) == want


def test_edge_examples():
    kink = parse_pd("X(1,1,2,2)")
    (e,) = edges(kink)
    before, after = resolve(kink, 0).circle_count, resolve(kink, 1).circle_count
    assert e.kind is (EdgeKind.MERGE if before > after else EdgeKind.SPLIT)
    T = from_braid(TREFOIL)
    es = edges(T)
    assert len(es) == 12
    for e in es:
        grow = resolve(T, e.target).circle_count - resolve(T, e.source).circle_count
        assert e.kind is (EdgeKind.SPLIT if grow == 1 else EdgeKind.MERGE)
    assert edges(parse_pd("")) == []


# chain complexes

def test_tqft_examples():
    assert tqft_maps(Theory.KHOVANOV, MapKind.MERGE, (0, 0)) == {}
    assert tqft_maps(Theory.LEE, MapKind.MERGE, (0, 0)) == {(1,): 1}
    assert tqft_maps(Theory.LEE, MapKind.SPLIT, (0,)) == {(0, 0): 1, (1, 1): 1}


def test_complex_examples():
    U = build_complex(parse_pd(""), Theory.KHOVANOV)
    assert U.gr == [0, 0] and sorted(U.q) == [-1, 1] and U.d == [{}, {}]
    T = build_complex(from_braid(TREFOIL), Theory.KHOVANOV)
    assert T.dimension == sum(2 ** resolve(T.diagram, v).circle_count for v in range(8))
    assert set(T.gr) == {0, 1, 2, 3} and all(q % 2 for q in T.q)
    for x in range(T.dimension):
        e = T.element(x)
        assert len(e.labels) == resolve(T.diagram, e.vertex).circle_count
        assert e.gr == bin(e.vertex).count("1") - T.diagram.n_minus
        assert e.q == e.p + e.gr + T.diagram.n_plus - T.diagram.n_minus


# linear algebra

def test_rank_examples():
    assert rank(SparseMatrixQ.identity(3)) == 3
    assert rank(SparseMatrixQ.zero(4, 7)) == 0
    assert rank(SparseMatrixQ.from_dense([[1, 2], [2, 4]])) == 1
    assert rank_profile(SparseMatrixQ.identity(3), (1, 2, 3)).ranks == (1, 2, 3)
    assert rank_profile(SparseMatrixQ.zero(3, 3), (1, 3)).ranks == (0, 0)
    assert rank_profile(SparseMatrixQ.from_dense([[1, 1], [0, 0]]), (1, 2)).ranks == (1, 1)
    B = SparseMatrixQ.from_dense([[3, 1, 0], [0, 5, 1]])
    assert augmented_rank(SparseMatrixQ.identity(2), B) == 2
    assert augmented_rank(SparseMatrixQ.zero(2, 2), SparseMatrixQ.identity(2)) == 2
    assert augmented_rank(SparseMatrixQ.from_dense([[1], [0]]),
                          SparseMatrixQ.from_dense([[0], [1]])) == 2


# homology

def test_khovanov_examples():
    assert nonzero(khovanov_homology(parse_pd(""))) == {(0, -1): 1, (0, 1): 1}
    kh = nonzero(khovanov_homology(from_braid(TREFOIL)))
    assert kh == {(0, 1): 1, (0, 3): 1, (2, 5): 1, (3, 9): 1}
    other_fig8 = parse_pd(FIGURE_EIGHT)
    assert nonzero(khovanov_homology(from_braid(FIG8))) == nonzero(khovanov_homology(other_fig8))


def test_width_examples():
    assert width(khovanov_homology(parse_pd(""))) == 2
    assert width(khovanov_homology(from_braid(FIG8))) == 2
    e = {x.name: x for x in load_bundled_table()}["9_42"]
    assert width(khovanov_homology(e.diagram())) == 3


def test_filtration_examples():
    U = lee_filtration(parse_pd(""))
    assert (U.dim_s(0, -1), U.dim_s(0, 1), U.dim_s(0, 3)) == (2, 1, 0)
    T = lee_filtration(from_braid(TREFOIL))
    assert (T.dim_s(0, 1), T.dim_s(0, 3), T.dim_s(0, 5)) == (2, 1, 0)
    assert all(T.homology_dim(i) == 0 for i in T.levels if i)
    assert lee_filtration(from_braid(BraidWord(2, (1, 1)))).total_rank() == 4


def test_s_examples():
    r = s_invariant(parse_pd(""))
    assert (r.s_max, r.s_min, r.s) == (1, -1, 0)
    assert s_invariant(from_braid(TREFOIL)).s == 2
    e = {x.name: x for x in load_bundled_table()}["10_139"]
    assert s_invariant(e.diagram()).s == 8


def test_barnatan_examples():
    assert barnatan_decomposition(khovanov_homology(parse_pd("")), 0) == {}
    assert barnatan_decomposition(khovanov_homology(from_braid(TREFOIL)), 2) == {(2, 5): 1}
    Q = barnatan_decomposition(khovanov_homology(from_braid(FIG8)), 0)
    assert Q and all(v > 0 for v in Q.values())


# canonical classes

def test_canonical_examples():
    U = build_complex(parse_pd(""))
    g1, g2 = canonical_generators(U)
    assert {g1.coloring, g2.coloring} == {(ALPHA,), (BETA,)}
    alpha = g1 if g1.coloring == (ALPHA,) else g2
    beta = g2 if alpha is g1 else g1
    assert alpha.expanded == {0: 1, 1: 1} and beta.expanded == {0: 1, 1: -1}
    assert class_filtration_grading(U, alpha.expanded) == -1
    T = build_complex(from_braid(TREFOIL))
    pair = canonical_generators(T)
    assert {g.coloring for g in pair} == {(ALPHA, BETA), (BETA, ALPHA)}
    assert all(class_filtration_grading(T, g.expanded) == 1 for g in pair)
    assert all({T.vertex_of(x) for x in g.expanded} == {oriented_vertex(T.diagram)} for g in pair)


@pytest.mark.parametrize("word", [TREFOIL, BraidWord(2, (1,) * 5), BraidWord(3, (1, 2, 1, 1, 2))])
def test_positive_grading_is_q_of_generator(word):
    D = from_braid(word)
    C = build_complex(D)
    k = resolve(D, 0).circle_count
    for g in canonical_generators(C):
        assert class_filtration_grading(C, g.expanded) == -k + D.num_crossings


def test_summand_examples():
    U = summand_split(build_complex(parse_pd("")))
    assert len(U.odd) == len(U.even) == 1 and U.sum_in != U.difference_in
    assert summand_split(build_complex(from_braid(TREFOIL))).preserved
    for D in (from_braid(TREFOIL), from_braid(FIG8), parse_pd(TREFOIL_RIGHT)):
        e_inf = s_invariant(D).e_infinity
        assert sorted((q - 1) % 4 for _, q in e_inf) == [0, 2]


# cobordism maps

def test_curl_map_on_unknot():
    U = parse_pd("")
    C = build_complex(U)
    D2, F = apply_move(U, C, Move("R1+", (1,)))
    image = {F.target.element(y).labels: c for y, c in F.columns[0].items()}
    assert image == {(0, 0): 1, (1, 1): -1}
    assert lee_isomorphism(F)
    assert check_canonical_transport(F) == (1, 1)


def test_parallel_r2_carries_generators_exactly():
    D = parse_pd(TREFOIL_RIGHT)
    C = build_complex(D)
    gens = [g.expanded for g in canonical_generators(C)]
    tried = 0
    for f in faces(D):
        walked = {}
        for arc, forward, _, _ in f:
            walked.setdefault(arc, forward)
        for x in walked:
            for y in walked:
                if x == y or walked[x] == walked[y]:
                    continue
                _, F = apply_move(D, C, Move("R2+", (x, y)))
                targets = [g.expanded for g in canonical_generators(F.target)]
                assert all(nonzero(F.apply(g)) in targets for g in gens)
                assert check_canonical_transport(F) == (1, 1)
                tried += 1
    assert tried


def test_morse_local_examples():
    alpha = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1}
    out = {}
    for labels, c in alpha.items():
        for res, e in tqft_maps(Theory.LEE, MapKind.MERGE, labels).items():
            out[res] = out.get(res, 0) + c * e
    assert out == {(0,): 2, (1,): 2}
    death = lambda v: sum(c * tqft_maps(Theory.LEE, MapKind.DEATH, (x,)).get((), 0)
                          for x, c in v.items())
    assert death({0: 1, 1: 1}) == death({0: 1, 1: -1}) == 1
    U = parse_pd("")
    D2, F = apply_move(U, build_complex(U), Move("birth"))
    assert F.filtered_degree == 1
    born = {F.target.element(y).labels for y in F.columns[0]}
    assert born == {(0, 1)} or born == {(1, 0)}


def test_movie_examples():
    U = parse_pd("")
    res = compose_movie(U, Movie([]))
    assert res.euler_characteristic == 0 and res.composite.filtered_degree == 0
    assert all(res.composite.columns[x] == {x: 1} for x in range(2))
    sphere = compose_movie(U, parse_movie("birth\ndeath circle=2\n"))
    assert sphere.composite.is_zero()


def test_transport_scalar_examples():
    D = from_braid(BraidWord(3, (1, 2, 1, -2)))
    _, F = apply_move(D, build_complex(D), Move("R3", (1, 2, 3)))
    assert set(check_canonical_transport(F)) <= {Fraction(v) for v in (1, -1, 2, -2)} | \
        {Fraction(1, 2), Fraction(-1, 2)}


# signature

def test_seifert_examples():
    V = seifert_matrix(TREFOIL)
    assert len(V) == 2
    pos, neg, zero = symmetric_signature(_sym(V))
    assert zero == 0 and (pos == 2 or neg == 2)
    assert seifert_matrix(BraidWord(2, (1,))) == []
    V8 = seifert_matrix(FIG8)
    assert len(V8) == 2 and signature(V8) == 0
    assert braid_signature(TREFOIL) == 2
    e = {x.name: x for x in load_bundled_table()}["10_139"]
    assert braid_signature(e.braid_word()) == 6


# command line

def _json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_cli_examples(capsys):
    assert _json(capsys, "compute", "--input", "braid:strands=2 1 1 1", "--format", "json")["s"] == 2
    r = _json(capsys, "compute", "--input", "name:9_42", "--data", "knots.csv", "--format", "json")
    assert (r["s"], r["sigma"]) == (0, 2)
    r = _json(capsys, "compute", "--input", "pd:", "--format", "json")
    assert (r["s"], r["width"], r["lee_rank"]) == (0, 2, 2)
    rows = _json(capsys, "table", "--where", "abs(s)>abs(sigma)", "--format", "json")
    assert len(rows) == 11
    rows = _json(capsys, "table", "--data", "small_knots.csv", "--where",
                 "s!=sigma and crossings <= 7", "--format", "json")
    assert rows == []


def test_cli_verify_examples(capsys):
    assert main(["verify", "--suite", "minmax", "--samples", "20", "--seed", "7"]) == 0
    assert main(["verify", "--suite", "mirror", "--samples", "10"]) == 0
    assert main(["verify", "--suite", "positive", "--samples", "5"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_cli_movie_examples(capsys, tmp_path):
    empty = tmp_path / "empty.movie"
    empty.write_text("# nothing happens\n")
    r = _json(capsys, "movie", str(empty), "--input", "pd:", "--format", "json")
    assert r["euler_characteristic"] == 0 and r["lee_isomorphism"]
    r = _json(capsys, "movie", "trefoil_unknot.movie", "--format", "json")
    assert r["euler_characteristic"] == -2 and r["nonzero"] and r["s_bound"] == 2
    assert main(["movie", "sphere.movie"]) == 0
    assert "warning" in capsys.readouterr().out
