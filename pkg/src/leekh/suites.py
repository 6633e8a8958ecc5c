"""Randomized property suites behind ``leekh verify``."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List

from .canonical import canonical_generators, class_filtration_grading
from .cobordism import (Move, PatternMismatch, apply_move, check_canonical_transport, faces,
                        find_bigon, kink_at, lee_isomorphism, match_triangle)
from .complex import Theory, build_complex
from .diagram import BraidWord, PlanarDiagram, connected_sum, from_braid, mirror
from .homology import (barnatan_decomposition, lee_filtration, lee_filtration_direct,
                       s_invariant, width)

TRANSPORT_SCALARS = {Fraction(1), Fraction(-1), Fraction(2), Fraction(-2),
                     Fraction(1, 2), Fraction(-1, 2)}

TORUS_BRAIDS = {
    "T(2,3)": BraidWord(2, (1, 1, 1)),
    "T(2,5)": BraidWord(2, (1,) * 5),
    "T(2,7)": BraidWord(2, (1,) * 7),
    "T(3,4)": BraidWord(3, (1, 2) * 4),
    "T(3,5)": BraidWord(3, (1, 2) * 5),
}


@dataclass
class Check:
    suite: str
    prop: str
    passed: bool
    detail: str = ""


def random_knot_braid(rng: random.Random, max_strands: int = 4, max_length: int = 8) -> BraidWord:
    """Uniform braid word whose closure is a knot; resamples until it is."""
    while True:
        n = rng.randint(2, max_strands)
        length = rng.randint(1, max_length)
        letters = tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(length))
        w = BraidWord(n, letters)
        if from_braid(w).is_knot():
            return w


def random_positive_braid(rng: random.Random, max_crossings: int = 9) -> BraidWord:
    while True:
        w = random_knot_braid(rng, 4, max_crossings)
        w = BraidWord(w.strands, tuple(abs(g) for g in w.letters))
        if from_braid(w).is_knot():
            return w


def _knots(rng, samples, max_length=8):
    return [random_knot_braid(rng, 4, max_length) for _ in range(samples)]


def suite_d2(rng, samples) -> List[Check]:
    out = []
    for w in _knots(rng, samples):
        D = from_braid(w)
        for theory in (Theory.KHOVANOV, Theory.LEE):
            C = build_complex(D, theory)
            ok = True
            for x in range(C.dimension):
                acc: Dict[int, int] = {}
                for y, c in C.d[x].items():
                    for z, e in C.d[y].items():
                        acc[z] = acc.get(z, 0) + c * e
                if any(acc.values()):
                    ok = False
                    break
            out.append(Check("d2", f"d^2 = 0 ({theory.value})", ok, str(w)))
            if theory is Theory.LEE:
                mono = all(C.q[y] >= C.q[x] for x, y, _ in C.entries())
                out.append(Check("d2", "Lee differential does not lower q", mono, str(w)))
            else:
                homog = all(C.q[y] == C.q[x] for x, y, _ in C.entries())
                out.append(Check("d2", "Khovanov differential preserves q", homog, str(w)))
    return out


def suite_filtration(rng, samples) -> List[Check]:
    out = []
    for w in _knots(rng, samples, 7):
        D = from_braid(w)
        C = build_complex(D)
        reduced = lee_filtration(D)
        direct = lee_filtration_direct(C)
        out.append(Check("filtration", "reduced and direct tables agree", reduced.same_as(direct), str(w)))
        r = s_invariant(D)
        grades = {class_filtration_grading(C, g.expanded) for g in canonical_generators(C)}
        out.append(Check("filtration", "canonical classes sit at s_min", grades == {r.s_min},
                         f"{w}: {sorted(grades)} vs {r.s_min}"))
    return out


def suite_mirror(rng, samples) -> List[Check]:
    out = []
    for w in _knots(rng, samples):
        D = from_braid(w)
        s, sm = s_invariant(D).s, s_invariant(mirror(D)).s
        out.append(Check("mirror", "s(mirror K) = -s(K)", sm == -s, f"{w}: {s}, {sm}"))
    return out


def suite_consum(rng, samples) -> List[Check]:
    out = []
    trefoil = from_braid(TORUS_BRAIDS["T(2,3)"])
    fixed = [("3_1 # 3_1", trefoil, trefoil, 4), ("3_1 # mirror 3_1", trefoil, mirror(trefoil), 0)]
    for label, A, B, want in fixed:
        s = s_invariant(connected_sum(A, B)).s
        out.append(Check("consum", f"s({label}) = {want}", s == want, f"got {s}"))
    for _ in range(samples):
        w1, w2 = random_knot_braid(rng, 3, 4), random_knot_braid(rng, 3, 4)
        A, B = from_braid(w1), from_braid(w2)
        s = s_invariant(connected_sum(A, B)).s
        parts = s_invariant(A).s + s_invariant(B).s
        out.append(Check("consum", "s(K1 # K2) = s(K1) + s(K2)", s == parts, f"{w1} # {w2}: {s} vs {parts}"))
    return out


def suite_minmax(rng, samples) -> List[Check]:
    out = []
    for w in _knots(rng, samples):
        r = s_invariant(from_braid(w))
        out.append(Check("minmax", "s_max = s_min + 2", r.s_max == r.s_min + 2, str(w)))
        out.append(Check("minmax", "s is even", r.s % 2 == 0, str(w)))
        conc = r.lee_rank == 2 and all(r.table.homology_dim(i) == 0 for i in r.table.levels if i)
        out.append(Check("minmax", "Lee rank 2 in degree 0", conc, str(w)))
    return out


def suite_positive(rng, samples) -> List[Check]:
    out = []
    words = list(TORUS_BRAIDS.items()) + [(str(w), w) for w in
                                          (random_positive_braid(rng) for _ in range(samples))]
    for label, w in words:
        s = s_invariant(from_braid(w)).s
        want = len(w.letters) - w.strands + 1
        out.append(Check("positive", "s = n - k + 1", s == want, f"{label}: {s} vs {want}"))
    return out


def suite_width_bn(rng, samples) -> List[Check]:
    out = []
    for w in _knots(rng, samples):
        r = s_invariant(from_braid(w))
        wd = width(r.kh)
        if wd <= 3:
            ok = barnatan_decomposition(r.kh, r.s) is not None
            out.append(Check("width-bn", "width <= 3 gives a non-negative decomposition", ok,
                             f"{w}: width {wd}"))
    return out


def reidemeister_candidates(D: PlanarDiagram, rng: random.Random) -> List[Move]:
    """One applicable move of each Reidemeister type, where the diagram has one."""
    moves = []
    arc = rng.choice(D.arcs)
    moves.append(Move("R1+", (arc,)))
    moves.append(Move("R1'+", (arc,)))
    fs = [f for f in faces(D) if len({s[0] for s in f}) >= 2]
    if fs:
        f = rng.choice(fs)
        x, y = rng.sample(sorted({s[0] for s in f}), 2)
        moves.append(Move("R2+", (x, y)))
    for i in range(D.num_crossings):
        try:
            kink_at(D, i)
        except PatternMismatch:
            continue
        moves.append(Move("R1-", (i + 1,)))
        break
    for i, j in itertools.combinations(range(D.num_crossings), 2):
        try:
            find_bigon(D, i, j)
        except PatternMismatch:
            continue
        moves.append(Move("R2-", (i + 1, j + 1)))
        break
    for tri in itertools.combinations(range(D.num_crossings), 3):
        try:
            match_triangle(D, tri)
        except PatternMismatch:
            continue
        moves.append(Move("R3", tuple(i + 1 for i in tri)))
        break
    return moves


def suite_reidcan(rng, samples) -> List[Check]:
    out = []
    for _ in range(samples):
        w = random_knot_braid(rng, 4, 6)
        D = from_braid(w)
        C = build_complex(D)
        for move in reidemeister_candidates(D, rng):
            _, F = apply_move(D, C, move)
            tag = f"{w} / {move}"
            out.append(Check("reidcan", f"{move.kind} chain map", F.is_chain_map(), tag))
            out.append(Check("reidcan", f"{move.kind} filtered of degree 0",
                             F.filtered_degree == 0 and F.respects_filtration(), tag))
            lams = check_canonical_transport(F)
            out.append(Check("reidcan", f"{move.kind} canonical scalar",
                             set(map(Fraction, lams)) <= TRANSPORT_SCALARS, f"{tag}: {lams}"))
            out.append(Check("reidcan", f"{move.kind} Lee isomorphism", lee_isomorphism(F), tag))
    return out


SUITES: Dict[str, Callable[[random.Random, int], List[Check]]] = {
    "d2": suite_d2,
    "filtration": suite_filtration,
    "mirror": suite_mirror,
    "consum": suite_consum,
    "minmax": suite_minmax,
    "reidcan": suite_reidcan,
    "positive": suite_positive,
    "width-bn": suite_width_bn,
}


def run_suite(name: str, seed: int, samples: int) -> List[Check]:
    return SUITES[name](random.Random(f"{name}:{seed}"), samples)
