"""Khovanov homology, width, the q-filtration on Lee homology and s.

The Lee complex is first shrunk by cancelling its q-preserving entries (see
``reduction``); the filtration on homology is then read off the small
remaining complex with exact rank profiles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .complex import DEFAULT_CAP, GradedComplex, Theory, build_complex
from .diagram import PlanarDiagram
from .linalg import Eliminator, SparseMatrixQ, rank_profile
from .reduction import ReducedComplex, cancel_complex

BigradedDims = Dict[Tuple[int, int], int]


class EmptyHomology(ValueError):
    pass


@dataclass(frozen=True)
class FiltrationTable:
    """``levels[i]`` maps q to dim S_q in homological degree i.

    Levels cover every q of the right parity from the lowest generator q to
    two above the highest; outside that window S_q is all of H^i or zero.
    """

    levels: Dict[int, Dict[int, int]]

    def homology_dim(self, i: int) -> int:
        lv = self.levels.get(i)
        return lv[min(lv)] if lv else 0

    def dim_s(self, i: int, q: int) -> int:
        lv = self.levels.get(i)
        if not lv:
            return 0
        lo, hi = min(lv), max(lv)
        if q <= lo:
            return lv[lo]
        if q > hi:
            return 0
        if q not in lv:
            q += 1  # opposite parity: next realized level up
        return lv[q]

    def total_rank(self) -> int:
        return sum(self.homology_dim(i) for i in self.levels)

    def e_infinity(self) -> Dict[Tuple[int, int], int]:
        out = {}
        for i, lv in self.levels.items():
            for q in sorted(lv):
                v = lv[q] - self.dim_s(i, q + 2)
                if v:
                    out[(i, q)] = v
        return out

    def same_as(self, other: "FiltrationTable") -> bool:
        degs = set(self.levels) | set(other.levels)
        for i in degs:
            qs = set(self.levels.get(i, {})) | set(other.levels.get(i, {}))
            if not qs:
                continue
            for q in range(min(qs) - 2, max(qs) + 3):
                if self.dim_s(i, q) != other.dim_s(i, q):
                    return False
        return True


@dataclass(frozen=True)
class SInvariantResult:
    s_min: Optional[int]
    s_max: Optional[int]
    s: Optional[int]
    lee_rank: int
    e_infinity: Dict[Tuple[int, int], int]
    table: FiltrationTable = field(repr=False)
    kh: BigradedDims = field(repr=False)


# --------------------------------------------------------------------------
# small complexes


@dataclass
class SmallComplex:
    """Generators grouped by degree with a sparse differential."""

    by_degree: Dict[int, List[int]]
    q: Dict[int, int]
    d: Dict[int, Dict[int, object]]

    @classmethod
    def from_graded(cls, C: GradedComplex) -> "SmallComplex":
        byd = C.basis_by_degree()
        return cls(byd, dict(enumerate(C.q)), dict(enumerate(C.d)))

    @classmethod
    def from_reduced(cls, R: ReducedComplex) -> "SmallComplex":
        return cls(R.by_degree(), R.q, R.d)

    def matrix(self, i: int, cols: Sequence[int]) -> SparseMatrixQ:
        rows = self.by_degree.get(i + 1, [])
        pos = {x: n for n, x in enumerate(rows)}
        columns = []
        for x in cols:
            col = sorted((pos[y], c) for y, c in self.d[x].items())
            columns.append(col)
        return SparseMatrixQ(len(rows), len(cols), columns)


def _levels(qs: Sequence[int]) -> List[int]:
    lo, hi = min(qs), max(qs)
    return list(range(hi + 2, lo - 1, -2))


def filtration_of(K: SmallComplex) -> FiltrationTable:
    levels: Dict[int, Dict[int, int]] = {}
    for i, gens in K.by_degree.items():
        if not gens:
            continue
        order = sorted(gens, key=lambda x: (-K.q[x], x))
        qs = [K.q[x] for x in order]
        grid = _levels(qs)
        # |F_q| for each level of the grid (descending q)
        cuts = []
        n = 0
        for lev in grid:
            while n < len(order) and qs[n] >= lev:
                n += 1
            cuts.append(n)
        Mi = K.matrix(i, order)
        prof = _profile(Mi, cuts)
        # boundaries from degree i-1, then unit vectors of F_q in the same order
        prev = K.by_degree.get(i - 1, [])
        rows_i = K.by_degree[i]
        pos = {x: m for m, x in enumerate(rows_i)}
        E = Eliminator()
        for x in prev:
            E.add({pos[y]: c for y, c in K.d[x].items()})
        rank_prev = E.rank
        aug = []
        j = 0
        for c in cuts:
            while j < c:
                E.add({pos[order[j]]: 1})
                j += 1
            aug.append(E.rank)
        lv = {}
        for lev, c, rk, ar in zip(grid, cuts, prof, aug):
            z = c - rk
            b = rank_prev + c - ar
            lv[lev] = z - b
        levels[i] = lv
    return FiltrationTable(levels)


def _profile(M: SparseMatrixQ, cuts: List[int]) -> List[int]:
    # rank_profile wants strictly increasing cuts; repeat values for plateaus
    uniq = sorted(set(c for c in cuts if c > 0))
    prof = dict(zip(uniq, rank_profile(M, uniq).ranks)) if uniq else {}
    prof[0] = 0
    return [prof[c] for c in cuts]


def homology_dims(K: SmallComplex) -> Dict[int, int]:
    """Total homology dimension per degree."""
    ranks = {}
    for i, gens in K.by_degree.items():
        E = Eliminator()
        for x in gens:
            E.add(dict(K.d[x]))
        ranks[i] = E.rank
    return {i: len(g) - ranks[i] - ranks.get(i - 1, 0) for i, g in K.by_degree.items()}


# --------------------------------------------------------------------------
# Khovanov homology


def khovanov_homology(D: PlanarDiagram, cap: int = DEFAULT_CAP) -> BigradedDims:
    """Bigraded dimensions by full cancellation of the Khovanov complex."""
    C = build_complex(D, Theory.KHOVANOV, cap)
    R = cancel_complex(C, filtered=False)
    if any(R.d[x] for x in R.gens):
        raise AssertionError("cancellation left a nonzero differential")
    return _count(R)


def _count(R: ReducedComplex) -> BigradedDims:
    dims: BigradedDims = {}
    for x in R.gens:
        key = (R.gr[x], R.q[x])
        dims[key] = dims.get(key, 0) + 1
    return dims


def khovanov_homology_direct(C: GradedComplex) -> BigradedDims:
    """Same dimensions from ranks of each q-block of a Khovanov complex."""
    if C.theory is not Theory.KHOVANOV:
        raise ValueError("needs the Khovanov complex")
    blocks: Dict[Tuple[int, int], List[int]] = {}
    for x in range(C.dimension):
        blocks.setdefault((C.gr[x], C.q[x]), []).append(x)
    rk = {}
    for key, gens in blocks.items():
        E = Eliminator()
        for x in gens:
            E.add(dict(C.d[x]))
        rk[key] = E.rank
    dims = {}
    for (i, j), gens in blocks.items():
        h = len(gens) - rk[(i, j)] - rk.get((i - 1, j), 0)
        if h:
            dims[(i, j)] = h
    return dims


def width(dims: BigradedDims) -> int:
    mus = {j - 2 * i for (i, j), v in dims.items() if v}
    if not mus:
        raise EmptyHomology("no nonzero homology")
    return (max(mus) - min(mus)) // 2 + 1


def poincare_string(dims: BigradedDims) -> str:
    terms = []
    for (i, j) in sorted(dims):
        v = dims[(i, j)]
        if not v:
            continue
        mono = []
        if i:
            mono.append("t" if i == 1 else f"t^{i}")
        if j:
            mono.append("q" if j == 1 else f"q^{j}")
        body = "*".join(mono) or "1"
        terms.append(body if v == 1 else f"{v}*{body}")
    return " + ".join(terms) if terms else "0"


# --------------------------------------------------------------------------
# Lee homology and s


def lee_reduction(D: PlanarDiagram, cap: int = DEFAULT_CAP, record: bool = False,
                  complex_: Optional[GradedComplex] = None) -> Tuple[GradedComplex, ReducedComplex]:
    C = complex_ if complex_ is not None else build_complex(D, Theory.LEE, cap)
    return C, cancel_complex(C, filtered=True, record=record)


def lee_filtration(D: PlanarDiagram, cap: int = DEFAULT_CAP) -> FiltrationTable:
    _, R = lee_reduction(D, cap)
    return filtration_of(SmallComplex.from_reduced(R))


def lee_filtration_direct(C: GradedComplex) -> FiltrationTable:
    """Filtration table computed on the unreduced Lee complex."""
    return filtration_of(SmallComplex.from_graded(C))


def s_from_table(table: FiltrationTable, knot: bool = True) -> Tuple[Optional[int], Optional[int]]:
    if not knot:
        return None, None
    for i, lv in table.levels.items():
        if i != 0 and table.homology_dim(i):
            raise AssertionError(f"knot has Lee homology in degree {i}")
    lv = table.levels.get(0, {})
    total = table.homology_dim(0)
    s_min = max(q for q, v in lv.items() if v == total)
    s_max = max(q for q, v in lv.items() if v > 0)
    return s_min, s_max


def s_invariant(D: PlanarDiagram, cap: int = DEFAULT_CAP) -> SInvariantResult:
    _, R = lee_reduction(D, cap)
    kh = _count(R)
    table = filtration_of(SmallComplex.from_reduced(R))
    knot = D.is_knot()
    s_min, s_max = s_from_table(table, knot)
    s = s_min + 1 if knot else None
    return SInvariantResult(s_min, s_max, s, table.total_rank(), table.e_infinity(), table, kh)


def barnatan_decomposition(dims: BigradedDims, s: int) -> Optional[Dict[Tuple[int, int], int]]:
    """Q with P = q^s (q + 1/q) + (1 + t q^4) Q and Q >= 0, or None."""
    rest: Dict[Tuple[int, int], int] = {k: v for k, v in dims.items() if v}
    for j in (s + 1, s - 1):
        rest[(0, j)] = rest.get((0, j), 0) - 1
    if not rest:
        return {}
    degs = [i for i, _ in rest]
    lo, hi = min(degs), max(degs)
    Q: Dict[Tuple[int, int], int] = {}
    prev: Dict[int, int] = {}
    for i in range(lo, hi + 2):
        cur = {j: v for (ii, j), v in rest.items() if ii == i}
        for j, v in prev.items():
            cur[j + 4] = cur.get(j + 4, 0) - v
        cur = {j: v for j, v in cur.items() if v}
        if any(v < 0 for v in cur.values()):
            return None
        if i == hi + 1 and cur:
            return None
        for j, v in cur.items():
            Q[(i, j)] = v
        prev = cur
    return Q
