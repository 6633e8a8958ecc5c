"""End-to-end acceptance criteria; each test prints one PASS/FAIL line."""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction
from importlib import resources

import pytest

from leekh.cobordism import (Move, PatternMismatch, apply_move, check_canonical_transport,
                             compose_movie, find_bigon, induced_rank, kink_at, lee_isomorphism,
                             match_triangle, parse_movie)
from leekh.complex import Theory, build_complex
from leekh.diagram import (BraidWord, connected_sum, from_braid, load_bundled_table, load_table,
                           mirror, parse_pd)
from leekh.homology import barnatan_decomposition, s_invariant, width
from leekh.signature import braid_signature
from leekh.suites import TORUS_BRAIDS, random_knot_braid, random_positive_braid

SCALARS = {Fraction(v) for v in (1, -1, 2, -2)} | {Fraction(1, 2), Fraction(-1, 2)}


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {n:2d} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def _data(name):
    return resources.files("leekh") / "data" / name


def _square_zero(C) -> bool:
    for x in range(C.dimension):
        acc = {}
        for y, c in C.d[x].items():
            for z, e in C.d[y].items():
                acc[z] = acc.get(z, 0) + c * e
        if any(acc.values()):
            return False
    return True


def test_criterion_01_unknot(report):
    t0 = time.perf_counter()
    r = s_invariant(parse_pd(""))
    elapsed = time.perf_counter() - t0
    ok = (r.s, r.s_min, r.s_max, r.lee_rank, width(r.kh)) == (0, -1, 1, 2, 2) and elapsed < 1
    report(1, ok, f"unknot s={r.s} s_min={r.s_min} s_max={r.s_max} rank={r.lee_rank} "
                  f"width={width(r.kh)} in {elapsed:.3f}s")


def test_criterion_02_table(report):
    entries = load_bundled_table()
    bad, slowest = [], 0.0
    for e in entries:
        t0 = time.perf_counter()
        s = s_invariant(e.diagram()).s
        slowest = max(slowest, time.perf_counter() - t0)
        if s != e.s_ref:
            bad.append(f"{e.name}: {s} vs {e.s_ref}")
    spot = {e.name: e.s_ref for e in entries}
    spot_ok = (spot["9_42"], spot["10_139"], spot["10_152"], spot["11n_77"]) == (0, 8, -8, 8)
    ok = len(entries) == 22 and not bad and spot_ok and slowest <= 600
    report(2, ok, f"{len(entries)} knots, mismatches {bad or 'none'}, slowest {slowest:.2f}s")


TORUS_EXPECTED = {"T(2,3)": (2, 3), "T(2,5)": (2, 5), "T(2,7)": (2, 7), "T(3,4)": (3, 4),
                  "T(3,5)": (3, 5)}


def test_criterion_03_torus(report):
    got, ok = [], True
    for name, (p, q) in TORUS_EXPECTED.items():
        t0 = time.perf_counter()
        s = s_invariant(from_braid(TORUS_BRAIDS[name])).s
        dt = time.perf_counter() - t0
        ok &= s == (p - 1) * (q - 1) and dt <= 120
        got.append(f"{name}={s} ({dt:.2f}s)")
    report(3, ok, ", ".join(got))


def test_criterion_04_positive(report):
    rng = random.Random("criterion-4")
    words = list(TORUS_BRAIDS.values()) + [random_positive_braid(rng) for _ in range(15)]
    bad = []
    for w in words:
        assert all(g > 0 for g in w.letters) and len(w.letters) <= 10
        s = s_invariant(from_braid(w)).s
        if s != len(w.letters) - w.strands + 1:
            bad.append(f"{w}: {s}")
    report(4, not bad, f"{len(words)} positive braids, failures {bad or 'none'}")


def test_criterion_05_structure(report):
    rng = random.Random("criterion-5")
    knots = [random_knot_braid(rng, 4, 8) for _ in range(20)]
    failures = []
    for w in knots:
        D = from_braid(w)
        assert D.num_crossings <= 8
        kh, lee = build_complex(D, Theory.KHOVANOV), build_complex(D, Theory.LEE)
        r = s_invariant(D)
        checks = {
            "d^2": _square_zero(kh),
            "d'^2": _square_zero(lee),
            "q monotone": all(lee.q[y] >= lee.q[x] for x, y, _ in lee.entries()),
            "s_max = s_min + 2": r.s_max == r.s_min + 2,
            "s even": r.s % 2 == 0,
            "rank 2 in degree 0": r.lee_rank == 2 and r.table.homology_dim(0) == 2,
        }
        failures += [f"{w}: {k}" for k, v in checks.items() if not v]
    report(5, not failures, f"{len(knots)} random knots, failures {failures or 'none'}")


def test_criterion_06_mirror_and_sum(report):
    rng = random.Random("criterion-6")
    bad = []
    for _ in range(10):
        D = from_braid(random_knot_braid(rng, 4, 8))
        if s_invariant(mirror(D)).s != -s_invariant(D).s:
            bad.append(D.pd_string())
    T = from_braid(BraidWord(2, (1, 1, 1)))
    s_sum = s_invariant(connected_sum(T, T)).s
    s_slice = s_invariant(connected_sum(T, mirror(T))).s
    ok = not bad and s_sum == 4 and s_slice == 0
    report(6, ok, f"mirror failures {len(bad)}/10, s(3_1#3_1)={s_sum}, s(3_1#-3_1)={s_slice}")


def test_criterion_07_alternating(report):
    with resources.as_file(_data("small_knots.csv")) as p:
        entries = load_table(p)
    tested, bad = 0, []
    for e in entries:
        D = e.diagram()
        if e.crossings > 9 or not e.braid or not D.is_alternating():
            continue
        tested += 1
        s, sigma = s_invariant(D).s, braid_signature(e.braid_word())
        if s != sigma:
            bad.append(f"{e.name}: s={s} sigma={sigma}")
    report(7, tested >= 70 and not bad, f"{tested} alternating knots, s != sigma: {bad or 'none'}")


def test_criterion_08_width_barnatan(report):
    diagrams = [e.diagram() for e in load_bundled_table()]
    with resources.as_file(_data("small_knots.csv")) as p:
        diagrams += [e.diagram() for e in load_table(p)]
    rng = random.Random("criterion-8")
    diagrams += [from_braid(random_knot_braid(rng, 4, 8)) for _ in range(20)]
    checked, bad = 0, []
    for D in diagrams:
        r = s_invariant(D)
        if width(r.kh) > 3:
            continue
        checked += 1
        if barnatan_decomposition(r.kh, r.s) is None:
            bad.append(D.pd_string())
    report(8, checked > 0 and not bad, f"{checked} knots of width <= 3, failures {len(bad)}")


def _moves_for(kind: str, rng: random.Random, want: int):
    """Pairs (diagram, move) with at most six crossings before the move."""
    found, attempts = [], 0
    while len(found) < want:
        attempts += 1
        assert attempts < 5000, f"could not find {want} diagrams for {kind}"
        D = from_braid(random_knot_braid(rng, 4, 6 if kind[:3] in ("R1+", "R1'", "R2+") else 8))
        if D.num_crossings > 6 and kind in ("R1+", "R1'+", "R2+"):
            continue
        if kind in ("R1+", "R1'+"):
            found.append((D, Move(kind, (rng.choice(D.arcs),))))
        elif kind == "R2+":
            from leekh.cobordism import faces
            fs = [f for f in faces(D) if len({s[0] for s in f}) >= 2]
            x, y = rng.sample(sorted({s[0] for s in rng.choice(fs)}), 2)
            found.append((D, Move("R2+", (x, y))))
        elif kind == "R1-":
            if D.num_crossings > 6:
                continue
            for i in range(D.num_crossings):
                try:
                    kink_at(D, i)
                except PatternMismatch:
                    continue
                found.append((D, Move("R1-", (i + 1,))))
                break
        elif kind == "R2-":
            if D.num_crossings > 6:
                continue
            for i, j in itertools.combinations(range(D.num_crossings), 2):
                try:
                    find_bigon(D, i, j)
                except PatternMismatch:
                    continue
                found.append((D, Move("R2-", (i + 1, j + 1))))
                break
        elif kind == "R3":
            if D.num_crossings > 6:
                continue
            for tri in itertools.combinations(range(D.num_crossings), 3):
                try:
                    match_triangle(D, tri)
                except PatternMismatch:
                    continue
                found.append((D, Move("R3", tuple(i + 1 for i in tri))))
                break
    return found


@pytest.mark.parametrize("kind", ["R1+", "R1'+", "R1-", "R2+", "R2-", "R3"])
def test_criterion_09_reidemeister(report, kind):
    rng = random.Random(f"criterion-9:{kind}")
    cases = _moves_for(kind, rng, 10)
    bad, scalars = [], set()
    for D, move in cases:
        C = build_complex(D)
        _, F = apply_move(D, C, move)
        lam = check_canonical_transport(F)
        scalars |= set(lam)
        ok = (F.is_chain_map() and F.filtered_degree == 0 and F.respects_filtration()
              and lee_isomorphism(F) and set(lam) <= SCALARS)
        if not ok:
            bad.append(f"{D.pd_string()} / {move}")
    report(9, not bad, f"{kind}: {len(cases)} diagrams, scalars "
                       f"{sorted(str(x) for x in scalars)}, failures {bad or 'none'}")


def test_criterion_10_movie(report):
    movie = parse_movie(_data("trefoil_unknot.movie").read_text(encoding="utf-8"))
    D = parse_pd(movie.start.partition(":")[2])
    res = compose_movie(D, movie)
    F = res.composite
    final = res.diagrams[-1]
    rank, _, _ = induced_rank(F)
    s = s_invariant(D).s
    ok = (res.euler_characteristic == -2 and F.filtered_degree == -2 and F.is_chain_map()
          and F.respects_filtration() and not F.is_zero() and rank == 2
          and final.num_crossings == 0 and final.num_components == 1
          and abs(s) <= -res.euler_characteristic and s == 2)
    report(10, ok, f"chi={res.euler_characteristic}, degree={F.filtered_degree}, "
                   f"Lee rank of composite={rank}, |s(3_1)|={abs(s)} <= {-res.euler_characteristic}")
