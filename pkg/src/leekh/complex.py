"""Khovanov and Lee chain complexes over the rationals.

Generators are indexed globally: vertex ``v`` owns the block
``offset[v] .. offset[v] + 2**r`` where ``r`` is its circle count. Inside a
block the label word is an ``r``-bit integer whose most significant bit is
circle 0; bit value 1 means ``v+`` and 0 means ``v-``. Increasing index is
therefore lexicographic order on (vertex, label word) with ``v- < v+``.

Differentials are stored column-major: ``d[x]`` maps row index to coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cube import Cube, EdgeKind
from .diagram import PlanarDiagram

VMINUS, VPLUS = 0, 1
DEFAULT_CAP = 50_000_000

LinearCombination = Dict[int, Fraction]


class Theory(Enum):
    KHOVANOV = "khovanov"
    LEE = "lee"


class MapKind(Enum):
    MERGE = "merge"
    SPLIT = "split"
    BIRTH = "birth"
    DEATH = "death"


class ArityMismatch(ValueError):
    pass


class DimensionCapExceeded(RuntimeError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"complex dimension {estimate} exceeds cap {cap}")
        self.estimate = estimate
        self.cap = cap


class DegreeMixed(ValueError):
    pass


def tqft_maps(theory: Theory, kind: MapKind, labels: Sequence[int] = ()) -> Dict[tuple, int]:
    """Local TQFT operation on circle labels (0 = v-, 1 = v+).

    The result maps output label tuples to coefficients. Death returns the
    empty tuple with the scalar coefficient.
    """
    arity = {MapKind.MERGE: 2, MapKind.SPLIT: 1, MapKind.BIRTH: 0, MapKind.DEATH: 1}[kind]
    if len(labels) != arity:
        raise ArityMismatch(f"{kind.value} takes {arity} labels, got {len(labels)}")
    lee = theory is Theory.LEE
    if kind is MapKind.MERGE:
        x, y = labels
        if x and y:
            return {(VPLUS,): 1}
        if x or y:
            return {(VMINUS,): 1}
        return {(VPLUS,): 1} if lee else {}
    if kind is MapKind.SPLIT:
        (x,) = labels
        if x:
            return {(VPLUS, VMINUS): 1, (VMINUS, VPLUS): 1}
        out = {(VMINUS, VMINUS): 1}
        if lee:
            out[(VPLUS, VPLUS)] = 1
        return out
    if kind is MapKind.BIRTH:
        return {(VPLUS,): 1}
    (x,) = labels
    return {} if x else {(): 1}


@dataclass(frozen=True)
class StateBasisElement:
    vertex: int
    labels: Tuple[int, ...]
    gr: int
    q: int

    @property
    def p(self) -> int:
        return sum(1 if x else -1 for x in self.labels)


def word_to_labels(word: int, r: int) -> Tuple[int, ...]:
    return tuple((word >> (r - 1 - i)) & 1 for i in range(r))


def labels_to_word(labels: Sequence[int]) -> int:
    w = 0
    for x in labels:
        w = (w << 1) | x
    return w


@dataclass
class GradedComplex:
    diagram: PlanarDiagram
    theory: Theory
    cube: Cube
    offset: List[int]
    gr: List[int]
    q: List[int]
    d: List[Dict[int, int]]
    _vertex_of: Optional[List[int]] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.gr)

    def vertex_of(self, x: int) -> int:
        if self._vertex_of is None:
            vo = []
            for v in range(len(self.offset) - 1):
                vo.extend([v] * (self.offset[v + 1] - self.offset[v]))
            self._vertex_of = vo
        return self._vertex_of[x]

    def index(self, vertex: int, labels: Sequence[int]) -> int:
        r = self.cube.circle_count(vertex)
        if len(labels) != r:
            raise ValueError("label count does not match circle count")
        return self.offset[vertex] + labels_to_word(labels)

    def element(self, x: int) -> StateBasisElement:
        v = self.vertex_of(x)
        r = self.cube.circle_count(v)
        return StateBasisElement(v, word_to_labels(x - self.offset[v], r), self.gr[x], self.q[x])

    def basis_by_degree(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for x, g in enumerate(self.gr):
            out.setdefault(g, []).append(x)
        return out

    def degrees(self) -> List[int]:
        return sorted(set(self.gr))

    def entries(self) -> Iterable[Tuple[int, int, int]]:
        """(source, target, coefficient) for every nonzero entry."""
        for x, col in enumerate(self.d):
            for y, c in col.items():
                yield x, y, c

    def dump(self, fh) -> None:
        """Write one line per entry: ``i q_src q_dst coeff row col``."""
        for x, y, c in self.entries():
            fh.write(f"{self.gr[x]} {self.q[x]} {self.q[y]} {c} {y} {x}\n")


def _edge_action(cube: Cube, v: int, l: int):
    """Target vertex, sign, and a function word -> {target word: coeff} pieces."""
    e = cube.edge(v, l)
    src, tgt = cube.res[v], cube.res[e.target]
    r, rt = src.circle_count, tgt.circle_count
    # target position of every source circle (via a representative arc)
    dest = [tgt.circle_of[c[0]] for c in src.circles]
    return e, r, rt, dest


def build_complex(D: PlanarDiagram, theory: Theory = Theory.LEE,
                  cap: int = DEFAULT_CAP, cube: Optional[Cube] = None) -> GradedComplex:
    """Full state basis and differential of the chosen theory."""
    k = D.num_crossings
    if cube is None:
        if k > 40:
            raise DimensionCapExceeded(2 ** k, cap)
        cube = Cube(D)
    est = cube.total_dimension()
    if est > cap:
        raise DimensionCapExceeded(est, cap)
    n_plus, n_minus = D.n_plus, D.n_minus
    offset = [0]
    for v in range(1 << k):
        offset.append(offset[-1] + (1 << cube.circle_count(v)))
    dim = offset[-1]
    gr = [0] * dim
    q = [0] * dim
    for v in range(1 << k):
        r = cube.circle_count(v)
        g = bin(v).count("1") - n_minus
        base = offset[v]
        shift = g + n_plus - n_minus - r
        for w in range(1 << r):
            gr[base + w] = g
            q[base + w] = 2 * bin(w).count("1") + shift
    d: List[Dict[int, int]] = [dict() for _ in range(dim)]
    lee = theory is Theory.LEE

    for v in range(1 << k):
        for l in range(k):
            if (v >> l) & 1:
                continue
            e, r, rt, dest = _edge_action(cube, v, l)
            sign = e.sign
            tbase = offset[e.target]
            base = offset[v]
            if e.kind is EdgeKind.MERGE:
                i, j = e.source_circles
                (t,) = e.target_circles
                others = [(r - 1 - c, rt - 1 - dest[c]) for c in range(r) if c not in (i, j)]
                bi, bj, bt = r - 1 - i, r - 1 - j, rt - 1 - t
                for w in range(1 << r):
                    rest = 0
                    for sb, tb in others:
                        if (w >> sb) & 1:
                            rest |= 1 << tb
                    xi, xj = (w >> bi) & 1, (w >> bj) & 1
                    if xi and xj:
                        d[base + w][tbase + (rest | (1 << bt))] = sign
                    elif xi or xj:
                        d[base + w][tbase + rest] = sign
                    elif lee:
                        d[base + w][tbase + (rest | (1 << bt))] = sign
            else:
                (i,) = e.source_circles
                t1, t2 = e.target_circles
                others = [(r - 1 - c, rt - 1 - dest[c]) for c in range(r) if c != i]
                bi, b1, b2 = r - 1 - i, rt - 1 - t1, rt - 1 - t2
                for w in range(1 << r):
                    rest = 0
                    for sb, tb in others:
                        if (w >> sb) & 1:
                            rest |= 1 << tb
                    col = d[base + w]
                    if (w >> bi) & 1:
                        col[tbase + (rest | (1 << b1))] = sign
                        col[tbase + (rest | (1 << b2))] = sign
                    else:
                        col[tbase + rest] = sign
                        if lee:
                            col[tbase + (rest | (1 << b1) | (1 << b2))] = sign
    return GradedComplex(D, theory, cube, offset, gr, q, d)


def apply_differential(C: GradedComplex, x: LinearCombination) -> LinearCombination:
    degs = {C.gr[i] for i in x}
    if len(degs) > 1:
        raise DegreeMixed(f"input spans homological degrees {sorted(degs)}")
    out: Dict[int, Fraction] = {}
    for i, a in x.items():
        for j, c in C.d[i].items():
            out[j] = out.get(j, 0) + a * c
    return {j: c for j, c in out.items() if c != 0}


def add_into(acc: Dict[int, Fraction], x: Dict[int, Fraction], scale=1) -> None:
    for i, a in x.items():
        v = acc.get(i, 0) + scale * a
        if v:
            acc[i] = v
        else:
            acc.pop(i, None)


def min_q(C: GradedComplex, x: LinearCombination) -> Optional[int]:
    return min((C.q[i] for i in x), default=None)


def euler_characteristic(C: GradedComplex) -> Dict[int, int]:
    """Graded Euler characteristic as a map q -> coefficient."""
    chi: Dict[int, int] = {}
    for g, qq in zip(C.gr, C.q):
        chi[qq] = chi.get(qq, 0) + (-1 if g % 2 else 1)
    return {k: v for k, v in chi.items() if v}
