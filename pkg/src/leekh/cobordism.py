"""Chain maps on Lee complexes for Reidemeister moves and Morse moves.

Every move produces a new diagram, relabelled canonically, together with a
``ChainMap`` from the Lee complex of the old diagram to that of the new one.
New crossings are always appended after the existing ones; moves that delete
crossings first reorder them to the end through a sign-twisted isomorphism.

Local maps are written with the Lee algebra on each circle: ``v+`` is the unit,
``v- * v- = v+``, and ``eps(v-) = 1``, ``eps(v+) = 0``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .canonical import canonical_generators
from .complex import DEFAULT_CAP, GradedComplex, Theory, build_complex, word_to_labels
from .diagram import DiagramError, PlanarDiagram, relabel
from .linalg import Eliminator

VM, VP = 0, 1
Chain = Dict[int, object]


class PatternMismatch(DiagramError):
    pass


class TransportFailed(RuntimeError):
    pass


# --------------------------------------------------------------------------
# chain maps


def _add(acc: Chain, key: int, val) -> None:
    nv = acc.get(key, 0) + val
    if nv:
        if isinstance(nv, Fraction) and nv.denominator == 1:
            nv = nv.numerator
        acc[key] = nv
    else:
        acc.pop(key, None)


def _axpy(acc: Chain, x: Chain, scale=1) -> None:
    for k, v in x.items():
        _add(acc, k, scale * v)


@dataclass
class ChainMap:
    source: GradedComplex
    target: GradedComplex
    columns: List[Chain]
    filtered_degree: int

    def apply(self, chain: Chain) -> Chain:
        out: Chain = {}
        for x, a in chain.items():
            for y, c in self.columns[x].items():
                _add(out, y, a * c)
        return out

    def after(self, first: "ChainMap") -> "ChainMap":
        """The composite ``self o first``."""
        if first.target is not self.source and first.target.dimension != self.source.dimension:
            raise ValueError("maps do not compose")
        cols = [self.apply(col) for col in first.columns]
        return ChainMap(first.source, self.target, cols,
                        first.filtered_degree + self.filtered_degree)

    def is_chain_map(self) -> bool:
        S, T = self.source, self.target
        for x in range(S.dimension):
            left = {}
            for y, c in self.columns[x].items():
                for z, e in T.d[y].items():
                    _add(left, z, c * e)
            right = self.apply(S.d[x])
            if left != right:
                return False
        return True

    def respects_filtration(self) -> bool:
        S, T = self.source, self.target
        deg = self.filtered_degree
        for x in range(S.dimension):
            for y in self.columns[x]:
                if T.q[y] < S.q[x] + deg or T.gr[y] != S.gr[x]:
                    return False
        return True

    def is_zero(self) -> bool:
        return not any(self.columns)


def identity_map(C: GradedComplex) -> ChainMap:
    return ChainMap(C, C, [{x: 1} for x in range(C.dimension)], 0)


# --------------------------------------------------------------------------
# state helpers


def decode(C: GradedComplex, x: int) -> Tuple[int, List[int]]:
    v = C.vertex_of(x)
    r = C.cube.circle_count(v)
    return v, list(word_to_labels(x - C.offset[v], r))


def encode(C: GradedComplex, v: int, labels: Sequence[int]) -> int:
    w = 0
    for b in labels:
        w = (w << 1) | b
    return C.offset[v] + w


def match_circles(C1: GradedComplex, v1: int, C2: GradedComplex, v2: int,
                  arcmap: Dict[int, int], skip: Iterable[int] = ()) -> List[Optional[int]]:
    """Circle of ``C2`` at ``v2`` matching each circle of ``C1`` at ``v1``.

    Arcs are carried over by ``arcmap`` (identity when absent). Circles made
    only of skipped arcs map to None.
    """
    skip = set(skip)
    res1, res2 = C1.cube.res[v1], C2.cube.res[v2]
    out: List[Optional[int]] = []
    for circ in res1.circles:
        hits = {res2.circle_of[arcmap.get(a, a)] for a in circ if a not in skip}
        if not hits:
            out.append(None)
        elif len(hits) != 1:
            raise PatternMismatch("circles do not correspond across the move")
        else:
            out.append(hits.pop())
    return out


def mult(a: int, b: int) -> Tuple[int, int]:
    """Lee product of two labels as (label, coefficient)."""
    if a and b:
        return VP, 1
    if a or b:
        return VM, 1
    return VP, 1


def edge_sign(v: int, l: int) -> int:
    return -1 if bin(v & ((1 << l) - 1)).count("1") % 2 else 1


def unsigned_edge(C: GradedComplex, x: int, l: int) -> Chain:
    """Image of ``x`` along the edge at crossing ``l`` without the edge sign."""
    v = C.vertex_of(x)
    t = v | (1 << l)
    sign = edge_sign(v, l)
    lo, hi = C.offset[t], C.offset[t + 1]
    return {y: c * sign for y, c in C.d[x].items() if lo <= y < hi}


# --------------------------------------------------------------------------
# faces and arc ends


def arc_end_slots(D: PlanarDiagram) -> Dict[int, List[Tuple[int, int]]]:
    ends: Dict[int, List[Tuple[int, int]]] = {}
    for i, x in enumerate(D.crossings):
        for s, a in enumerate(x):
            ends.setdefault(a, []).append((i, s))
    return ends


def faces(D: PlanarDiagram) -> List[List[Tuple[int, bool, Tuple[int, int], Tuple[int, int]]]]:
    """Faces as walks with the face on the right.

    Each step is (arc, along orientation?, start end, finish end), where an
    end is a (crossing, slot) pair.
    """
    ends = arc_end_slots(D)
    arc_ends = D.arc_ends()
    seen: Set[Tuple[int, int]] = set()
    out = []
    for i in range(len(D.crossings)):
        for s in range(4):
            if (i, s) in seen:
                continue
            walk = []
            cur = (i, s)
            while cur not in seen:
                seen.add(cur)
                ci, cs = cur
                start = (ci, (cs + 1) % 4)
                arc = D.crossings[ci][start[1]]
                pair = ends[arc]
                finish = pair[1] if pair[0] == start else pair[0]
                forward = arc_ends[arc]["tail"] == start
                walk.append((arc, forward, start, finish))
                cur = finish
            out.append(walk)
    return out


def _fresh(D: PlanarDiagram, n: int) -> List[int]:
    m = max(D.successor) if D.successor else 0
    return list(range(m + 1, m + 1 + n))


def _replace_slots(crossings: List[List[int]], repl: Dict[Tuple[int, int], int]) -> None:
    for (i, s), a in repl.items():
        crossings[i][s] = a


def _diagram_from_parts(crossings: Sequence[Sequence[int]], over_forward: Sequence[bool],
                        free_circles: Sequence[int] = ()) -> PlanarDiagram:
    """Assemble a diagram; components follow from the crossings."""
    succ: Dict[int, int] = {}
    for (a, b, c, d), f in zip(crossings, over_forward):
        succ[a] = c
        if f:
            succ[d] = b
        else:
            succ[b] = d
    for a in free_circles:
        succ[a] = a
    todo = set(succ)
    comps = []
    while todo:
        start = min(todo)
        comp = [start]
        todo.discard(start)
        x = succ[start]
        while x != start:
            comp.append(x)
            todo.discard(x)
            x = succ[x]
        comps.append(tuple(comp))
    return PlanarDiagram(tuple(tuple(c) for c in crossings), tuple(comps), tuple(over_forward))


def free_circles(D: PlanarDiagram) -> List[int]:
    used = {a for c in D.crossings for a in c}
    return [comp[0] for comp in D.components if len(comp) == 1 and comp[0] not in used]


def raw_diagram(crossings: Sequence[Sequence[int]], over_forward: Sequence[bool],
                arcs: Iterable[int]) -> PlanarDiagram:
    """A crossing list without orientation data, used only for cube structure."""
    return PlanarDiagram(tuple(tuple(c) for c in crossings), tuple((a,) for a in sorted(set(arcs))),
                         tuple(over_forward))


def merge_labels(D: PlanarDiagram, drop: Sequence[int], classes: Sequence[Sequence[int]],
                 raw: bool = False, discard: Iterable[int] = ()) -> Tuple[PlanarDiagram, Dict[int, int]]:
    """Delete crossings ``drop`` and identify each class of arcs to one label."""
    rep: Dict[int, int] = {}
    for cls in classes:
        m = min(cls)
        for a in cls:
            rep[a] = m
    # classes may overlap through shared arcs; close them up
    changed = True
    while changed:
        changed = False
        for a in list(rep):
            r = rep[a]
            if rep.get(r, r) != r:
                rep[a] = rep[r]
                changed = True
    arcmap = {a: rep.get(a, a) for a in D.successor}
    drop = set(drop)
    xs = [tuple(arcmap[a] for a in c) for i, c in enumerate(D.crossings) if i not in drop]
    fw = [f for i, f in enumerate(D.over_forward) if i not in drop]
    arcs = set(arcmap.values()) - {arcmap[a] for a in discard}
    if raw:
        return raw_diagram(xs, fw, arcs), arcmap
    used = {a for c in xs for a in c}
    free = sorted(a for a in arcs if a not in used)
    return _diagram_from_parts(xs, fw, free), arcmap


# --------------------------------------------------------------------------
# isomorphisms: reordering crossings and relabelling arcs


def cube_isomorphism(C1: GradedComplex, C2: GradedComplex, perm: Sequence[int],
                     arcmap: Dict[int, int], vertex_bits: Optional[Tuple[int, int]] = None,
                     skip: Iterable[int] = ()) -> Dict[int, Chain]:
    """Map generators of ``C1`` to ``C2`` when crossing ``l`` of the first cube
    plays the role of crossing ``perm[l]`` of the second.

    Edge signs are matched by a sign per vertex found by breadth-first search.
    ``vertex_bits`` = (mask, value) restricts to vertices of ``C1`` with those
    bits fixed; the fixed bits are left out of ``perm``.
    """
    k1 = C1.cube.k
    mask, value = vertex_bits if vertex_bits else (0, 0)
    free = [l for l in range(k1) if not (mask >> l) & 1]
    if len(free) != len(perm):
        raise ValueError("permutation does not cover the free crossings")

    def target_vertex(v):
        t = 0
        for j, l in enumerate(free):
            if (v >> l) & 1:
                t |= 1 << perm[j]
        return t

    signs: Dict[int, int] = {value: 1}
    todo = deque([value])
    while todo:
        v = todo.popleft()
        for j, l in enumerate(free):
            if (v >> l) & 1:
                continue
            w = v | (1 << l)
            s = signs[v] * edge_sign(v, l) * edge_sign(target_vertex(v), perm[j])
            if w in signs:
                if signs[w] != s:
                    raise AssertionError("inconsistent sign twist")
            else:
                signs[w] = s
                todo.append(w)
    out: Dict[int, Chain] = {}
    for v, s in signs.items():
        t = target_vertex(v)
        m = match_circles(C1, v, C2, t, arcmap, skip)
        r2 = C2.cube.circle_count(t)
        if sorted(x for x in m if x is not None) != list(range(r2)) or None in m:
            raise PatternMismatch("cube isomorphism does not match circles")
        r1 = C1.cube.circle_count(v)
        for w in range(1 << r1):
            labels = word_to_labels(w, r1)
            new = [0] * r2
            for i, lab in enumerate(labels):
                new[m[i]] = lab
            out[C1.offset[v] + w] = {encode(C2, t, new): s}
    return out


def reorder(D: PlanarDiagram, order: Sequence[int], cap: int = DEFAULT_CAP,
            C: Optional[GradedComplex] = None) -> Tuple[PlanarDiagram, ChainMap]:
    """Diagram with crossings listed as ``order`` and the isomorphism to it."""
    D2 = PlanarDiagram(tuple(D.crossings[i] for i in order), D.components,
                       tuple(D.over_forward[i] for i in order))
    C = C or build_complex(D, Theory.LEE, cap)
    C2 = build_complex(D2, Theory.LEE, cap)
    pos = {old: new for new, old in enumerate(order)}
    cols = cube_isomorphism(C, C2, [pos[l] for l in range(D.num_crossings)], {})
    return D2, ChainMap(C, C2, [cols[x] for x in range(C.dimension)], 0)


def canonicalize(D: PlanarDiagram, C: GradedComplex, cap: int = DEFAULT_CAP
                 ) -> Tuple[PlanarDiagram, ChainMap]:
    D2, mapping = relabel(D)
    C2 = build_complex(D2, Theory.LEE, cap)
    cols = cube_isomorphism(C, C2, list(range(D.num_crossings)), mapping)
    return D2, ChainMap(C, C2, [cols[x] for x in range(C.dimension)], 0)


# --------------------------------------------------------------------------
# Reidemeister I


def add_kink(D: PlanarDiagram, arc: int, positive: bool) -> Tuple[PlanarDiagram, Dict[int, int], int]:
    """Insert a curl on ``arc``; returns the diagram, arc map back, and the loop arc."""
    if arc not in D.successor:
        raise PatternMismatch(f"no arc {arc}")
    x1, x2, y = _fresh(D, 3)
    xs = [list(c) for c in D.crossings]
    free = free_circles(D)
    if arc in free:
        x2 = x1
        free = [a for a in free if a != arc]
    else:
        ends = D.arc_ends()[arc]
        _replace_slots(xs, {ends["tail"]: x1, ends["head"]: x2})
    if positive:
        xs.append([x1, x2, y, y])
    else:
        xs.append([y, x1, x2, y])
    D2 = _diagram_from_parts(xs, list(D.over_forward) + [positive], free)
    return D2, {x1: arc, x2: arc, y: arc}, y


def kink_at(D: PlanarDiagram, i: int) -> Tuple[int, int, int]:
    """(loop arc, incoming arc, outgoing arc) of a curl at crossing ``i``."""
    a, b, c, d = D.crossings[i]
    pos = D.over_forward[i]
    if pos:
        if c == d:
            return c, a, b
        if a == b:
            return a, d, c
    else:
        if a == d:
            return a, b, c
        if b == c:
            return b, a, d
    raise PatternMismatch(f"crossing {i + 1} is not a curl")


def remove_kink(D: PlanarDiagram, i: int) -> Tuple[PlanarDiagram, Dict[int, int], int, int]:
    """Delete the curl at crossing ``i``; returns diagram, arc map, loop and through arc."""
    y, xin, xout = kink_at(D, i)
    D2, arcmap = merge_labels(D, [i], [[xin, xout]], discard=[y])
    return D2, arcmap, y, xin


def _kink_vertex_bit(positive: bool) -> int:
    # the loop closes off into its own circle at the oriented smoothing
    return 0 if positive else 1


def r1_add_map(D: PlanarDiagram, C: GradedComplex, D2: PlanarDiagram, C2: GradedComplex,
               arcmap: Dict[int, int], y: int, positive: bool) -> ChainMap:
    k = D.num_crossings
    cols: List[Chain] = []
    for x in range(C.dimension):
        v, labels = decode(C, x)
        t = v | (_kink_vertex_bit(positive) << k)
        res2 = C2.cube.res[t]
        small = res2.circle_of[y]
        # old circle i -> new circle, through any arc other than the loop
        back = {a: a for a in D.successor}
        for a2, a in arcmap.items():
            if a2 != y:
                back[a] = a2
        m = match_circles(C, v, C2, t, back)
        # the circle that carries the curl
        carrier = C.cube.res[v].circle_of[arcmap[y]]
        r2 = res2.circle_count
        col: Chain = {}

        def put(lab_carrier, lab_small, coeff):
            new = [0] * r2
            for i, lab in enumerate(labels):
                new[m[i]] = lab
            new[m[carrier]] = lab_carrier
            new[small] = lab_small
            _add(col, encode(C2, t, new), coeff)

        if positive:
            if labels[carrier] == VM:
                put(VM, VM, 1)
                put(VP, VP, -1)
            else:
                put(VP, VM, 1)
                put(VM, VP, -1)
        else:
            put(labels[carrier], VP, 1)
        cols.append(col)
    return ChainMap(C, C2, cols, 0)


def r1_remove_map(D: PlanarDiagram, C: GradedComplex, D2: PlanarDiagram, C2: GradedComplex,
                  arcmap: Dict[int, int], y: int, through: int, positive: bool) -> ChainMap:
    """``D`` has the curl as its last crossing."""
    k = D.num_crossings - 1
    small_bit = _kink_vertex_bit(positive)
    cols: List[Chain] = []
    for x in range(C.dimension):
        v, labels = decode(C, x)
        col: Chain = {}
        if ((v >> k) & 1) == small_bit:
            t = v & ~(1 << k)
            res = C.cube.res[v]
            small = res.circle_of[y]
            m = match_circles(C, v, C2, t, arcmap, skip=[y])
            r2 = C2.cube.circle_count(t)
            rest = [0] * r2
            for i, lab in enumerate(labels):
                if i != small:
                    rest[m[i]] = lab
            s = labels[small]
            if positive:
                if s == VM:
                    _add(col, encode(C2, t, rest), 1)
            else:
                # the curl's circle label multiplies into the carrier, twisted
                carrier = C2.cube.res[t].circle_of[arcmap[through]]
                lab, c = mult(rest[carrier], s)
                rest[carrier] = lab
                _add(col, encode(C2, t, rest), -c if s == VP else c)
        cols.append(col)
    return ChainMap(C, C2, cols, 0)


# --------------------------------------------------------------------------
# Reidemeister II


@dataclass
class BigonData:
    """A diagram ``M`` whose last two crossings bound a bigon, and the diagram
    ``L0`` left after removing them, with the arc map ``M -> L0``."""

    M: PlanarDiagram
    CM: GradedComplex
    L0: PlanarDiagram
    C0: GradedComplex
    arcmap: Dict[int, int]
    bigon: Tuple[int, int]
    P: int = 0
    S: int = 0

    def __post_init__(self):
        k = self.M.num_crossings - 2
        circle_local = []
        for u in range(4):
            res = self.CM.cube.res[u << k]
            has = any(set(c) <= set(self.bigon) for c in res.circles)
            circle_local.append(has)
        if circle_local[0] or circle_local[3] or circle_local[1] == circle_local[2]:
            raise PatternMismatch("crossings do not form a bigon")
        self.S = 1 if circle_local[1] else 2
        self.P = 3 - self.S
        self.k = k

    def local_sign(self, u: int, j: int) -> int:
        return -1 if (j == 1 and u & 1) else 1

    def vertex(self, v: int, u: int) -> int:
        return v | (u << self.k)

    def translate(self, src: GradedComplex, x: int, dst: GradedComplex, t: int,
                  arcmap: Dict[int, int], extra: Dict[int, int] = None) -> int:
        v, labels = decode(src, x)
        m = match_circles(src, v, dst, t, arcmap, skip=self.bigon if src is self.CM else ())
        r2 = dst.cube.circle_count(t)
        new = [0] * r2
        for i, lab in enumerate(labels):
            if m[i] is not None:
                new[m[i]] = lab
        for c, lab in (extra or {}).items():
            new[c] = lab
        return encode(dst, t, new)

    def _small(self, t: int) -> int:
        res = self.CM.cube.res[t]
        for i, c in enumerate(res.circles):
            if set(c) <= set(self.bigon):
                return i
        raise AssertionError("no small circle")

    def _strip_small(self, x: int, into: int) -> Tuple[int, int]:
        """State at an S vertex -> (state at local vertex ``into``, small label)."""
        v, labels = decode(self.CM, x)
        small = self._small(v)
        lab = labels[small]
        base = v & ~(3 << self.k)
        t = self.vertex(base, into)
        y = self.translate(self.CM, x, self.CM, t, {}, None)
        return y, lab

    def _insert_small(self, y: int, lab: int) -> int:
        v = self.CM.vertex_of(y)
        base = v & ~(3 << self.k)
        t = self.vertex(base, self.S)
        small = self._small(t)
        return self.translate(self.CM, y, self.CM, t, {}, {small: lab})

    def rho(self) -> ChainMap:
        """``C(L0) -> C(M)``: z + kappa * iota(d_{P->11} z)."""
        jP = 0 if self.P == 2 else 1   # local crossing flipped from P to 11
        jS = 1 - jP
        sP = self.local_sign(self.P, jP)
        sS = self.local_sign(self.S, jS)
        kappa = -sP * sS
        back = {}
        for a, b in self.arcmap.items():
            if a not in self.bigon:
                back.setdefault(b, a)
        cols = []
        for z in range(self.C0.dimension):
            v = self.C0.vertex_of(z)
            zp = self.translate(self.C0, z, self.CM, self.vertex(v, self.P), back)
            col = {zp: 1}
            for y, c in unsigned_edge(self.CM, zp, self.k + jP).items():
                _add(col, self._insert_small(y, VP), kappa * c)
            cols.append(col)
        return ChainMap(self.C0, self.CM, cols, 0)

    def g(self) -> ChainMap:
        """``C(M) -> C(L0)``: identity on P, a death-and-saddle on S."""
        j00P = 0 if self.P == 1 else 1
        j00S = 1 - j00P
        kappa = -self.local_sign(0, j00P) * self.local_sign(0, j00S)
        cols = []
        for x in range(self.CM.dimension):
            v = self.CM.vertex_of(x)
            u = (v >> self.k) & 3
            base = v & ~(3 << self.k)
            col: Chain = {}
            if u == self.P:
                _add(col, self.translate(self.CM, x, self.C0, base, self.arcmap), 1)
            elif u == self.S:
                y, lab = self._strip_small(x, 0)
                if lab == VM:
                    for w, c in unsigned_edge(self.CM, y, self.k + j00P).items():
                        _add(col, self.translate(self.CM, w, self.C0, base, self.arcmap), kappa * c)
            cols.append(col)
        return ChainMap(self.CM, self.C0, cols, 0)

    def homotopy(self) -> List[Chain]:
        """K on C(M) with dK + Kd = 1 - rho g; lowers homological degree by one."""
        jS11 = 0 if self.S == 2 else 1
        j00S = 0 if self.S == 1 else 1
        sS11 = self.local_sign(self.S, jS11)
        s00S = self.local_sign(0, j00S)
        cols = []
        for x in range(self.CM.dimension):
            v = self.CM.vertex_of(x)
            u = (v >> self.k) & 3
            base = v & ~(3 << self.k)
            theta = -1 if bin(base).count("1") % 2 else 1
            col: Chain = {}
            if u == 3:
                _add(col, self._insert_small(x, VP), theta * sS11)
            elif u == self.S:
                y, lab = self._strip_small(x, 0)
                if lab == VM:
                    _add(col, y, theta * s00S)
            cols.append(col)
        return cols


def check_homotopy(B: BigonData, K: List[Chain], rho: ChainMap, g: ChainMap) -> bool:
    C = B.CM
    rg = rho.after(g)
    for x in range(C.dimension):
        acc: Chain = {}
        for y, c in K[x].items():
            for z, e in C.d[y].items():
                _add(acc, z, c * e)
        for y, c in C.d[x].items():
            for z, e in K[y].items():
                _add(acc, z, c * e)
        target = {x: 1}
        _axpy(target, rg.columns[x], -1)
        if acc != target:
            return False
    return True


def add_bigon(D: PlanarDiagram, over: int, under: int
              ) -> Tuple[PlanarDiagram, Dict[int, int], Tuple[int, int]]:
    """Push arc ``over`` across arc ``under`` through a shared face."""
    if over == under:
        raise PatternMismatch("R2 needs two different arcs")
    if over not in D.successor or under not in D.successor:
        raise PatternMismatch("unknown arc")
    free = free_circles(D)
    if over in free or under in free:
        raise PatternMismatch("R2 on a crossingless circle is not supported")
    face = None
    for f in faces(D):
        arcs = [s[0] for s in f]
        if over in arcs and under in arcs:
            face = f
            break
    if face is None:
        raise PatternMismatch(f"arcs {over} and {under} share no face")
    step_x = next(s for s in face if s[0] == over)
    step_y = next(s for s in face if s[0] == under)
    x_right = step_x[1]
    ends_x = D.arc_ends()[over]
    ends_y = D.arc_ends()[under]
    x1, x2, x3, y1, y2, y3 = _fresh(D, 6)
    # y's top end is nearest the head of x in the local picture
    top_end = step_y[2] if x_right else step_y[3]
    y_down = top_end == ends_y["tail"]
    y_top, y_bot = (y1, y3) if y_down else (y3, y1)
    y_mid = y2
    if x_right:
        c1 = [x2, y_mid, x1, y_bot]
        c2 = [x2, y_top, x3, y_mid]
    else:
        c1 = [y_bot, x1, y_mid, x2]
        c2 = [y_mid, x3, y_top, x2]
    y_in1 = y_mid if y_down else y_bot
    y_in2 = y_top if y_down else y_mid
    new = []
    fw = []
    for cyc, yin, xin in ((c1, y_in1, x1), (c2, y_in2, x2)):
        r = cyc.index(yin)
        t = cyc[r:] + cyc[:r]
        new.append(t)
        fw.append(t[3] == xin)
    xs = [list(c) for c in D.crossings]
    _replace_slots(xs, {ends_x["tail"]: x1, ends_x["head"]: x3,
                        ends_y["tail"]: y1, ends_y["head"]: y3})
    D2 = _diagram_from_parts(xs + new, list(D.over_forward) + fw, free)
    arcmap = {a: a for a in D.successor if a not in (over, under)}
    arcmap.update({x1: over, x2: over, x3: over, y1: under, y2: under, y3: under})
    return D2, arcmap, (x2, y2)


def find_bigon(D: PlanarDiagram, i: int, j: int) -> Tuple[Tuple[int, int], List[List[int]]]:
    """Bigon arcs between crossings ``i`` and ``j`` and the two strand classes."""
    xi, xj = D.crossings[i], D.crossings[j]
    for f in faces(D):
        ends = {s[2][0] for s in f} | {s[3][0] for s in f}
        if len(f) == 2 and ends == {i, j}:
            e1, e2 = f[0][0], f[1][0]
            break
    else:
        raise PatternMismatch(f"crossings {i + 1} and {j + 1} do not bound a bigon")
    classes = []
    for e in (e1, e2):
        cls = {e}
        for x in (xi, xj):
            s = [t for t in range(4) if x[t] == e]
            for t in s:
                cls.add(x[(t + 2) % 4])
        classes.append(sorted(cls))
    # one strand must pass over at both crossings
    if _over_at(D, i, e1) != _over_at(D, j, e1):
        raise PatternMismatch("bigon strands alternate; not a Reidemeister II bigon")
    return (e1, e2), classes


# --------------------------------------------------------------------------
# Reidemeister III


@dataclass
class Triangle:
    a: int
    b: int
    c: int
    s1: int
    s2: int
    s3: int
    P: Tuple[int, int, int, int, int, int]


def match_triangle(D: PlanarDiagram, crossings: Sequence[int]) -> Triangle:
    """Fit the three crossings to the standard triangle picture.

    Around ``c`` the arcs read P1, P2, s2, s3 counterclockwise; ``a`` reads
    s1, s2, P3, P4 and ``b`` reads P0, s3, s1, P5. The strand through s1 is the
    one that slides.
    """
    cs = list(crossings)
    if len(set(cs)) != 3:
        raise PatternMismatch("R3 needs three distinct crossings")
    X = {i: D.crossings[i] for i in cs}
    for c in cs:
        others = [i for i in cs if i != c]
        xc = X[c]
        for r in range(4):
            P1, P2, s2, s3 = (xc[(r + t) % 4] for t in range(4))
            # a holds s2, b holds s3
            for a, b in (others, others[::-1]):
                xa, xb = X[a], X[b]
                if s2 not in xa or s3 not in xb:
                    continue
                shared = [e for e in xa if e in xb]
                for s1 in shared:
                    ra = _cyclic_match(xa, [s1, s2, None, None])
                    rb = _cyclic_match(xb, [None, s3, s1, None])
                    if ra is None or rb is None:
                        continue
                    P3, P4 = xa[(ra + 2) % 4], xa[(ra + 3) % 4]
                    P0, P5 = xb[rb % 4], xb[(rb + 3) % 4]
                    tri = Triangle(a, b, c, s1, s2, s3, (P0, P1, P2, P3, P4, P5))
                    if _is_triangle_face(D, tri) and _slider_ok(D, tri):
                        return tri
    raise PatternMismatch("crossings do not form a Reidemeister III triangle")


def _cyclic_match(x, pattern) -> Optional[int]:
    for r in range(4):
        if all(p is None or x[(r + t) % 4] == p for t, p in enumerate(pattern)):
            return r
    return None


def _is_triangle_face(D: PlanarDiagram, tri: Triangle) -> bool:
    for f in faces(D):
        if len(f) == 3 and sorted(s[0] for s in f) == sorted((tri.s1, tri.s2, tri.s3)):
            crossings = {s[2][0] for s in f}
            if crossings == {tri.a, tri.b, tri.c}:
                return True
    return False


def _over_at(D: PlanarDiagram, i: int, arc: int) -> bool:
    x = D.crossings[i]
    s = [t for t in range(4) if x[t] == arc][0]
    return s % 2 == 1


def _slider_ok(D: PlanarDiagram, tri: Triangle) -> bool:
    return _over_at(D, tri.a, tri.s1) == _over_at(D, tri.b, tri.s1)


def r3_result(D: PlanarDiagram, tri: Triangle) -> Tuple[PlanarDiagram, Tuple[int, int, int],
                                                          Tuple[int, int, int]]:
    """Diagram after the move with crossings a', b', c' appended at the end
    (the old three removed). Returns the diagram, positions of (a', b', c')
    and the new internal arcs (t1, t2, t3)."""
    P0, P1, P2, P3, P4, P5 = tri.P
    t1, t2, t3 = _fresh(D, 3)
    slider_over = _over_at(D, tri.a, tri.s1)
    l2_over = _over_at(D, tri.c, tri.s2)
    ends = D.arc_ends()
    # strand directions: is each internal arc traversed from its first listed end?
    l1_right = ends[tri.s1]["tail"][0] == tri.a     # P3 -> a -> b -> P0
    l2_up = ends[tri.s2]["tail"][0] == tri.a        # P4 -> a -> c -> P1
    l3_up = ends[tri.s3]["tail"][0] == tri.b        # P5 -> b -> c -> P2
    # after: a' = (P0, P1, t1, t2), b' = (t1, P2, P3, t3), c' = (t2, t3, P4, P5)
    # L1: P3 -> b' -> a' -> P0 ; L2: P4 -> c' -> a' -> P1 ; L3: P5 -> c' -> b' -> P2
    # each pattern: ccw arcs, slot where the first strand enters, slot where the
    # second enters, whether the first strand is over; arcs may repeat, so
    # slots are used instead of labels
    specs = [
        ([P0, P1, t1, t2], 2 if l1_right else 0, 3 if l2_up else 1, slider_over),
        ([t1, P2, P3, t3], 2 if l1_right else 0, 3 if l3_up else 1, slider_over),
        ([t2, t3, P4, P5], 2 if l2_up else 0, 3 if l3_up else 1, l2_over),
    ]
    new = []
    fw = []
    for cyc, in_p, in_q, p_over in specs:
        under_in, over_in = (in_q, in_p) if p_over else (in_p, in_q)
        t = cyc[under_in:] + cyc[:under_in]
        new.append(tuple(t))
        fw.append((over_in - under_in) % 4 == 3)
    keep = [i for i in range(D.num_crossings) if i not in (tri.a, tri.b, tri.c)]
    xs = [D.crossings[i] for i in keep] + new
    ofw = [D.over_forward[i] for i in keep] + fw
    D2 = _diagram_from_parts(xs, ofw, free_circles(D))
    n = len(keep)
    return D2, (n, n + 1, n + 2), (t1, t2, t3)


def _smoothing_pairs(x: Sequence[int], bit: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    a, b, c, d = x
    return ((a, d), (b, c)) if bit else ((a, b), (c, d))


def _horizontal_bit(x: Sequence[int], pair: Tuple[int, int]) -> int:
    for bit in (0, 1):
        for p in _smoothing_pairs(x, bit):
            if set(p) == set(pair):
                return bit
    raise AssertionError("pair is not a smoothing")


def _half_diagram(D: PlanarDiagram, ci: int, bit: int) -> Tuple[PlanarDiagram, Dict[int, int]]:
    """Crossing ``ci`` (the last one) replaced by its ``bit`` smoothing."""
    pairs = _smoothing_pairs(D.crossings[ci], bit)
    return merge_labels(D, [ci], [list(p) for p in pairs], raw=True)


def _apply_cols(cols, chain: Chain) -> Chain:
    out: Chain = {}
    for x, a in chain.items():
        for y, c in cols[x].items():
            _add(out, y, a * c)
    return out


def _inverse(cols: Dict[int, Chain]) -> Dict[int, Chain]:
    inv = {}
    for x, col in cols.items():
        (y, s), = col.items()
        inv[y] = {x: s}
    return inv


class TrianglePieces:
    """Both sides of a Reidemeister III move split along the third crossing.

    Each side is a cone over its last crossing. One smoothing of that crossing
    leaves a bigon (the ``M`` half), the other is the same picture on both
    sides up to planar isotopy (the ``N`` half).
    """

    def __init__(self, D: PlanarDiagram, tri: Triangle, cap: int = DEFAULT_CAP,
                 C: Optional[GradedComplex] = None):
        keep = [i for i in range(D.num_crossings) if i not in (tri.a, tri.b, tri.c)]
        L, self.iso = reorder(D, keep + [tri.a, tri.b, tri.c], cap, C)
        n = self.n = len(keep)
        a, b, c = n, n + 1, n + 2
        self.c = c
        Lt, _, (t1, t2, t3) = r3_result(D, tri)
        self.L, self.Lt = L, Lt
        self.CL = CL = self.iso.target
        self.CLt = CLt = build_complex(Lt, Theory.LEE, cap)
        P0, P1, P2, P3, P4, P5 = tri.P
        beta = _horizontal_bit(L.crossings[c], (tri.s2, tri.s3))
        if _horizontal_bit(Lt.crossings[c], (t2, t3)) != beta:
            raise AssertionError("triangle smoothings disagree")
        self.r2bit, self.isobit = beta, 1 - beta

        M, mapM = _half_diagram(L, c, self.r2bit)
        Mt, mapMt = _half_diagram(Lt, c, self.r2bit)
        N, mapN = _half_diagram(L, c, self.isobit)
        Nt, mapNt = _half_diagram(Lt, c, self.isobit)
        CM = build_complex(M, Theory.LEE, cap)
        CMt = build_complex(Mt, Theory.LEE, cap)
        self.CN = CN = build_complex(N, Theory.LEE, cap)
        self.CNt = CNt = build_complex(Nt, Theory.LEE, cap)
        # the diagram left once the bigon is gone, common to both sides
        L0, map0 = merge_labels(M, [a, b], [[mapM[P3], mapM[tri.s1], mapM[P0]],
                                             [mapM[P4], mapM[tri.s2], mapM[P5]]], raw=True)
        C0 = build_complex(L0, Theory.LEE, cap)
        arcM0 = {x: map0[x] for x in M.successor}
        # M~ -> L0 through the shared boundary labels; its bigon arcs lie in the
        # slider class and in the class of P1, P2
        to0 = {mapMt[x]: map0[mapM[x]] for x in Lt.successor if x not in (t1, t2, t3)}
        to0[mapMt[t1]] = map0[mapM[P3]]
        to0[mapMt[t2]] = map0[mapM[P1]]
        self.B = BigonData(M, CM, L0, C0, arcM0, (mapM[tri.s1], mapM[tri.s2]))
        self.Bt = BigonData(Mt, CMt, L0, C0, to0, (mapMt[t1], mapMt[t2]))

        def half_iso(CL_, half_bit, Craw, amap):
            return cube_isomorphism(CL_, Craw, list(range(n + 2)), amap,
                                    (1 << c, half_bit << c))

        self.hM = half_iso(CL, self.r2bit, CM, mapM)
        self.hN = half_iso(CL, self.isobit, CN, mapN)
        self.hMt = half_iso(CLt, self.r2bit, CMt, mapMt)
        self.hNt = half_iso(CLt, self.isobit, CNt, mapNt)

        # planar isotopy between the N halves; a and b may trade places
        amap = {mapN[x]: mapNt[x] for x in L.successor if x not in (tri.s1, tri.s2, tri.s3)}
        inner = set(N.successor) - set(amap)
        self.Phi = None
        for perm in ([0, 1], [1, 0]):
            p = list(range(n)) + [n + perm[0], n + perm[1]]
            try:
                Phi = cube_isomorphism(CN, CNt, p, amap, skip=inner)
            except PatternMismatch:
                continue
            if ChainMap(CN, CNt, [Phi[x] for x in range(CN.dimension)], 0).is_chain_map():
                self.Phi = Phi
                break
        if self.Phi is None:
            raise PatternMismatch("the two halves are not isotopic")
        self.phi_sign = 1
        self.phi_sign = self._edge_compatibility_sign()

    def _edge_compatibility_sign(self) -> int:
        """Sign making the isotopy agree with the cone edges after the bigon maps.

        With the bigon in the 0 half this compares E~ rho~ with Phi E rho on
        the reduced diagram; with the bigon in the 1 half it compares g E with
        g~ E~ Phi on the N half.
        """
        rho_t, g = self._maps()
        CL, CLt, c = self.CL, self.CLt, self.c
        hM_inv, hMt_inv = _inverse(self.hM), _inverse(self.hMt)
        if self.r2bit == 0:
            rho = self.B.rho()
            pairs = []
            for z in range(self.B.C0.dimension):
                left = self.cone_edge(_apply_cols(hMt_inv, rho_t.columns[z]), CLt)
                right = self.iso_half(self.cone_edge(_apply_cols(hM_inv, rho.columns[z]), CL))
                pairs.append((left, right))
        else:
            gt = self.Bt.g()
            pairs = []
            for x in range(CL.dimension):
                if ((CL.vertex_of(x) >> c) & 1) != self.isobit:
                    continue
                left = g.apply(_apply_cols(self.hM, self.cone_edge({x: 1}, CL)))
                right = gt.apply(_apply_cols(self.hMt, self.cone_edge(self.iso_half({x: 1}), CLt)))
                pairs.append((left, right))
        for sign in (1, -1):
            if all(l == {k: sign * v for k, v in r.items()} for l, r in pairs):
                return sign
        raise AssertionError("cone edges do not match across the move")

    def cone_edge(self, chain: Chain, CC: GradedComplex) -> Chain:
        """Part of the differential from the 0 half to the 1 half."""
        c = self.c
        out: Chain = {}
        for x, a in chain.items():
            if (CC.vertex_of(x) >> c) & 1:
                continue
            for y, e in CC.d[x].items():
                if (CC.vertex_of(y) >> c) & 1:
                    _add(out, y, a * e)
        return out

    def iso_half(self, chain: Chain) -> Chain:
        """N half of C(L) -> N half of C(L~)."""
        out = _apply_cols(_inverse(self.hNt), _apply_cols(self.Phi, _apply_cols(self.hN, chain)))
        if self.phi_sign < 0:
            out = {k: -v for k, v in out.items()}
        return out

    def bigon_half(self, chain: Chain) -> Chain:
        """M half of C(L) -> M half of C(L~) through the diagram without the bigon."""
        rho_t, g = self._maps()
        return _apply_cols(_inverse(self.hMt), rho_t.apply(g.apply(_apply_cols(self.hM, chain))))

    def _maps(self):
        if not hasattr(self, "_cached"):
            self._cached = (self.Bt.rho(), self.B.g())
        return self._cached

    def chain_map(self) -> ChainMap:
        CL, CLt = self.CL, self.CLt
        c = self.c
        cols: List[Chain] = []
        if self.r2bit == 0:
            # C(L) is the cone of (M half -> N half)
            K = self.B.homotopy()
            hM_inv = _inverse(self.hM)
            for x in range(CL.dimension):
                if (CL.vertex_of(x) >> c) & 1:
                    col = self.iso_half({x: 1})
                else:
                    col = self.bigon_half({x: 1})
                    kz = _apply_cols(hM_inv, _apply_cols(K, self.hM[x]))
                    _axpy(col, self.iso_half(self.cone_edge(kz, CL)), -1)
                cols.append(col)
        else:
            # C(L) is the cone of (N half -> M half)
            K = self.Bt.homotopy()
            hMt_inv = _inverse(self.hMt)
            for x in range(CL.dimension):
                if (CL.vertex_of(x) >> c) & 1:
                    col = self.bigon_half({x: 1})
                else:
                    y = self.iso_half({x: 1})
                    col = dict(y)
                    e = self.cone_edge(y, CLt)
                    _axpy(col, _apply_cols(hMt_inv, _apply_cols(K, _apply_cols(self.hMt, e))), -1)
                cols.append(col)
        return ChainMap(CL, CLt, cols, 0)


def r3_map(D: PlanarDiagram, tri: Triangle, cap: int = DEFAULT_CAP,
           C: Optional[GradedComplex] = None) -> Tuple[PlanarDiagram, ChainMap]:
    T = TrianglePieces(D, tri, cap, C)
    full = T.chain_map().after(T.iso)
    D3, fix = canonicalize(T.Lt, T.CLt, cap)
    return D3, fix.after(full)


# --------------------------------------------------------------------------
# moves as (new diagram, chain map)


def _move_r1_add(D, C, arc, positive, cap):
    D2, am, y = add_kink(D, arc, positive)
    C2 = build_complex(D2, Theory.LEE, cap)
    return D2, r1_add_map(D, C, D2, C2, am, y, positive)


def _move_r1_remove(D, C, i, cap):
    k = D.num_crossings
    Dr, iso = reorder(D, [j for j in range(k) if j != i] + [i], cap, C)
    D2, am, y, through = remove_kink(Dr, k - 1)
    C2 = build_complex(D2, Theory.LEE, cap)
    F = r1_remove_map(Dr, iso.target, D2, C2, am, y, through, Dr.over_forward[k - 1])
    return D2, F.after(iso)


def _move_r2_add(D, C, over, under, cap):
    D2, am, bigon = add_bigon(D, over, under)
    C2 = build_complex(D2, Theory.LEE, cap)
    B = BigonData(D2, C2, D, C, am, bigon)
    return D2, B.rho()


def _move_r2_remove(D, C, i, j, cap):
    k = D.num_crossings
    (e1, e2), classes = find_bigon(D, i, j)
    Dr, iso = reorder(D, [l for l in range(k) if l not in (i, j)] + [i, j], cap, C)
    D2, am = merge_labels(Dr, [k - 2, k - 1], classes, discard=[e1, e2])
    C2 = build_complex(D2, Theory.LEE, cap)
    B = BigonData(Dr, iso.target, D2, C2, am, (e1, e2))
    return D2, B.g().after(iso)


def _move_r3(D, C, crossings, cap):
    tri = match_triangle(D, crossings)
    return r3_map(D, tri, cap, C)


# --------------------------------------------------------------------------
# Morse moves


def _move_birth(D: PlanarDiagram, C: GradedComplex, cap: int):
    (new,) = _fresh(D, 1)
    D2 = PlanarDiagram(D.crossings, D.components + ((new,),), D.over_forward)
    C2 = build_complex(D2, Theory.LEE, cap)
    cols = []
    for x in range(C.dimension):
        v, labels = decode(C, x)
        m = match_circles(C, v, C2, v, {})
        new_labels = [0] * C2.cube.circle_count(v)
        for i, lab in enumerate(labels):
            new_labels[m[i]] = lab
        new_labels[C2.cube.res[v].circle_of[new]] = VP
        cols.append({encode(C2, v, new_labels): 1})
    return D2, ChainMap(C, C2, cols, 1)


def _move_death(D: PlanarDiagram, C: GradedComplex, circle: int, cap: int):
    if circle not in free_circles(D):
        raise PatternMismatch(f"arc {circle} is not a crossingless circle")
    comps = tuple(c for c in D.components if c != (circle,))
    D2 = PlanarDiagram(D.crossings, comps, D.over_forward)
    C2 = build_complex(D2, Theory.LEE, cap)
    cols = []
    for x in range(C.dimension):
        v, labels = decode(C, x)
        gone = C.cube.res[v].circle_of[circle]
        col: Chain = {}
        if labels[gone] == VM:
            m = match_circles(C, v, C2, v, {}, skip=[circle])
            new_labels = [0] * C2.cube.circle_count(v)
            for i, lab in enumerate(labels):
                if i != gone:
                    new_labels[m[i]] = lab
            col[encode(C2, v, new_labels)] = 1
        cols.append(col)
    return D2, ChainMap(C, C2, cols, 1)


def saddle_diagram(D: PlanarDiagram, x: int, y: int) -> Tuple[PlanarDiagram, Set[int], Set[int]]:
    """Band two arcs together; returns the diagram, the arcs consumed and the arcs created."""
    if x == y:
        raise PatternMismatch("saddle needs two different arcs")
    for arc in (x, y):
        if arc not in D.successor:
            raise PatternMismatch(f"no arc {arc}")
    free = free_circles(D)
    if x in free or y in free:
        gone = x if x in free else y
        comps = tuple(c for c in D.components if c != (gone,))
        return PlanarDiagram(D.crossings, comps, D.over_forward), {gone}, set()
    ok = False
    for f in faces(D):
        steps = {s[0]: s[1] for s in f}
        if x in steps and y in steps and steps[x] == steps[y]:
            ok = True
            break
    if not ok:
        raise PatternMismatch(f"arcs {x} and {y} are not antiparallel across a face")
    A, B = _fresh(D, 2)
    ends = D.arc_ends()
    xs = [list(c) for c in D.crossings]
    _replace_slots(xs, {ends[x]["tail"]: A, ends[y]["head"]: A,
                        ends[y]["tail"]: B, ends[x]["head"]: B})
    D2 = _diagram_from_parts(xs, D.over_forward, free)
    return D2, {x, y}, {A, B}


def _move_saddle(D: PlanarDiagram, C: GradedComplex, x: int, y: int, cap: int):
    D2, old, new = saddle_diagram(D, x, y)
    C2 = build_complex(D2, Theory.LEE, cap)
    probe_new = min(new) if new else (y if x in old else x)
    cols = []
    for z in range(C.dimension):
        v, labels = decode(C, z)
        res, res2 = C.cube.res[v], C2.cube.res[v]
        cx, cy = res.circle_of[x], res.circle_of[y]
        col: Chain = {}
        base = [0] * res2.circle_count
        for i, lab in enumerate(labels):
            if i not in (cx, cy):
                base[res2.circle_of[res.circles[i][0]]] = lab
        if cx != cy:
            t = res2.circle_of[probe_new]
            lab, coeff = mult(labels[cx], labels[cy])
            base[t] = lab
            col[encode(C2, v, base)] = coeff
        else:
            ta, tb = res2.circle_of[min(new)], res2.circle_of[max(new)]
            if labels[cx] == VP:
                pairs = [(VP, VM), (VM, VP)]
            else:
                pairs = [(VM, VM), (VP, VP)]
            for la, lb in pairs:
                base[ta], base[tb] = la, lb
                _add(col, encode(C2, v, base), 1)
        cols.append(col)
    return D2, ChainMap(C, C2, cols, -1)


# --------------------------------------------------------------------------
# movies


MOVE_NAMES = ("R1+", "R1'+", "R1-", "R2+", "R2-", "R3", "birth", "death", "saddle")


@dataclass(frozen=True)
class Move:
    kind: str
    args: Tuple[int, ...] = ()
    line: int = 0

    @property
    def degree(self) -> int:
        return {"birth": 1, "death": 1, "saddle": -1}.get(self.kind, 0)

    def __str__(self) -> str:
        key = {"R1+": "arc", "R1'+": "arc", "R1-": "crossing", "R2+": "arcs", "R2-": "crossings",
               "R3": "crossings", "death": "circle", "saddle": "arcs"}.get(self.kind)
        if not key:
            return self.kind
        return f"{self.kind} {key}=" + ",".join(map(str, self.args))


class MovieError(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"move {index}: {reason}")
        self.index = index
        self.reason = reason


_ARITY = {"R1+": ("arc", 1), "R1'+": ("arc", 1), "R1-": ("crossing", 1),
          "R2+": ("arcs", 2), "R2-": ("crossings", 2), "R3": ("crossings", 3),
          "birth": (None, 0), "death": ("circle", 1), "saddle": ("arcs", 2)}


def parse_move(text: str, line: int = 0) -> Move:
    parts = text.split()
    kind = parts[0]
    aliases = {"Birth": "birth", "Death": "death", "Saddle": "saddle", "R1'-": "R1-"}
    kind = aliases.get(kind, kind)
    if kind not in _ARITY:
        raise MovieError(line, f"unknown move {parts[0]!r}")
    key, n = _ARITY[kind]
    args: Tuple[int, ...] = ()
    opts = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
    if len(opts) != len(parts) - 1:
        raise MovieError(line, f"cannot read {text!r}")
    if kind == "R2-" and "arcs" in opts:
        key = "arcs"
    if key:
        if key not in opts or len(opts) != 1:
            raise MovieError(line, f"{kind} needs {key}=")
        try:
            args = tuple(int(t) for t in opts[key].split(","))
        except ValueError:
            raise MovieError(line, f"bad number in {text!r}") from None
        if len(args) != n:
            raise MovieError(line, f"{kind} needs {n} value(s)")
        if key == "arcs" and kind == "R2-":
            kind = "R2-arcs"
    elif opts:
        raise MovieError(line, f"{kind} takes no arguments")
    return Move(kind, args, line)


@dataclass
class Movie:
    """Moves with an optional starting diagram given by a ``diagram`` line."""

    moves: List[Move]
    start: Optional[str] = None

    @property
    def euler_characteristic(self) -> int:
        return sum(1 for m in self.moves if m.kind in ("birth", "death")) - \
            sum(1 for m in self.moves if m.kind == "saddle")


def parse_movie(text: str) -> Movie:
    moves = []
    start = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("diagram"):
            start = line[len("diagram"):].strip()
            continue
        moves.append(parse_move(line, n))
    return Movie(moves, start)


def apply_move(D: PlanarDiagram, C: GradedComplex, move: Move, cap: int = DEFAULT_CAP
               ) -> Tuple[PlanarDiagram, ChainMap]:
    """Apply one move; the new diagram is relabelled canonically."""
    k = D.num_crossings

    def crossing(i):
        if not 1 <= i <= k:
            raise PatternMismatch(f"no crossing {i}")
        return i - 1

    kind, a = move.kind, move.args
    if kind == "R1+":
        D2, F = _move_r1_add(D, C, a[0], True, cap)
    elif kind == "R1'+":
        D2, F = _move_r1_add(D, C, a[0], False, cap)
    elif kind == "R1-":
        D2, F = _move_r1_remove(D, C, crossing(a[0]), cap)
    elif kind == "R2+":
        D2, F = _move_r2_add(D, C, a[0], a[1], cap)
    elif kind == "R2-":
        D2, F = _move_r2_remove(D, C, crossing(a[0]), crossing(a[1]), cap)
    elif kind == "R2-arcs":
        pair = _crossings_of_bigon(D, a[0], a[1])
        D2, F = _move_r2_remove(D, C, pair[0], pair[1], cap)
    elif kind == "R3":
        D2, F = _move_r3(D, C, [crossing(i) for i in a], cap)
    elif kind == "birth":
        D2, F = _move_birth(D, C, cap)
    elif kind == "death":
        D2, F = _move_death(D, C, a[0], cap)
    elif kind == "saddle":
        D2, F = _move_saddle(D, C, a[0], a[1], cap)
    else:
        raise PatternMismatch(f"unknown move {kind}")
    if kind == "R3":
        return D2, F
    D3, fix = canonicalize(D2, F.target, cap)
    return D3, fix.after(F)


def _crossings_of_bigon(D: PlanarDiagram, e1: int, e2: int) -> Tuple[int, int]:
    ends = arc_end_slots(D)
    c1 = {i for i, _ in ends.get(e1, [])}
    c2 = {i for i, _ in ends.get(e2, [])}
    both = sorted(c1 & c2)
    if len(both) != 2:
        raise PatternMismatch(f"arcs {e1} and {e2} do not bound a bigon")
    return both[0], both[1]


@dataclass
class MovieResult:
    diagrams: List[PlanarDiagram]
    steps: List[ChainMap]
    composite: ChainMap
    euler_characteristic: int


def compose_movie(D: PlanarDiagram, movie: Movie, cap: int = DEFAULT_CAP,
                  on_step: Optional[Callable[[int, Move, PlanarDiagram], None]] = None
                  ) -> MovieResult:
    C = build_complex(D, Theory.LEE, cap)
    total = identity_map(C)
    diagrams = [D]
    steps = []
    for n, move in enumerate(movie.moves, 1):
        try:
            D, F = apply_move(D, total.target, move, cap)
        except (PatternMismatch, DiagramError) as exc:
            raise MovieError(n, str(exc)) from exc
        steps.append(F)
        total = F.after(total)
        diagrams.append(D)
        if on_step:
            on_step(n, move, D)
    return MovieResult(diagrams, steps, total, movie.euler_characteristic)


# --------------------------------------------------------------------------
# effect on Lee homology


def boundary_eliminator(C: GradedComplex, degree: int) -> Eliminator:
    E = Eliminator()
    for x in range(C.dimension):
        if C.gr[x] == degree - 1 and C.d[x]:
            E.add(C.d[x])
    return E


def _solve_two(r: Chain, r1: Chain, r2: Chain) -> Optional[Tuple[Fraction, Fraction]]:
    keys = sorted(set(r) | set(r1) | set(r2))
    rows = [(Fraction(r1.get(k, 0)), Fraction(r2.get(k, 0)), Fraction(r.get(k, 0))) for k in keys]
    sol = None
    for i, (a1, b1, c1) in enumerate(rows):
        for a2, b2, c2 in rows[i + 1:]:
            det = a1 * b2 - a2 * b1
            if det:
                sol = ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)
                break
        if sol:
            break
    if sol is None:
        raise TransportFailed("canonical classes are dependent in the target")
    lam, mu = sol
    if any(a * lam + b * mu != c for a, b, c in rows):
        return None
    return lam, mu


def check_canonical_transport(F: ChainMap) -> Tuple[Fraction, Fraction]:
    """Scalars with F[g_i] = lambda_i [g'_pi(i)] for the two canonical classes.

    The pairing ``pi`` is found from the images, so the answer does not depend
    on which generator is called the first one.
    """
    src = canonical_generators(F.source)
    dst = canonical_generators(F.target)
    E = boundary_eliminator(F.target, 0)
    r1, r2 = E.reduce(dst[0].expanded), E.reduce(dst[1].expanded)
    lams = []
    used = []
    for g in src:
        sol = _solve_two(E.reduce(F.apply(g.expanded)), r1, r2)
        if sol is None:
            raise TransportFailed("image is not a combination of canonical classes")
        lam, mu = sol
        if lam and not mu:
            lams.append(lam)
            used.append(0)
        elif mu and not lam:
            lams.append(mu)
            used.append(1)
        else:
            raise TransportFailed(f"image mixes canonical classes ({lam}, {mu})")
    if used[0] == used[1]:
        raise TransportFailed("both canonical classes land on the same class")
    return lams[0], lams[1]


def kernel_basis(C: GradedComplex, degree: int) -> List[Chain]:
    gens = [x for x in range(C.dimension) if C.gr[x] == degree]
    pivots: Dict[int, Tuple[Chain, Chain]] = {}
    out = []
    for x in gens:
        vec: Chain = dict(C.d[x])
        combo: Chain = {x: 1}
        while vec:
            r = min(vec)
            if r not in pivots:
                pivots[r] = (vec, combo)
                break
            pv, pc = pivots[r]
            f = Fraction(vec[r]) / pv[r]
            _axpy(vec, pv, -f)
            _axpy(combo, pc, -f)
        else:
            out.append(combo)
    return out


def induced_rank(F: ChainMap) -> Tuple[int, int, int]:
    """(rank of F on Lee homology, source homology rank, target homology rank)."""
    rank = src_total = dst_total = 0
    for i in sorted(set(F.source.gr) | set(F.target.gr)):
        Z = kernel_basis(F.source, i)
        Bs = boundary_eliminator(F.source, i)
        src_total += len(Z) - Bs.rank
        Zt = kernel_basis(F.target, i)
        Bt = boundary_eliminator(F.target, i)
        dst_total += len(Zt) - Bt.rank
        base = Bt.rank
        for z in Z:
            Bt.add(F.apply(z))
        rank += Bt.rank - base
    return rank, src_total, dst_total


# --------------------------------------------------------------------------
# entry points by move family


REIDEMEISTER = {"R1+", "R1'+", "R1-", "R2+", "R2-", "R2-arcs", "R3"}
MORSE = {"birth", "death", "saddle"}


def reidemeister_map(D: PlanarDiagram, move: Move, cap: int = DEFAULT_CAP,
                     C: Optional[GradedComplex] = None) -> Tuple[PlanarDiagram, ChainMap]:
    if move.kind not in REIDEMEISTER:
        raise PatternMismatch(f"{move.kind} is not a Reidemeister move")
    return apply_move(D, C or build_complex(D, Theory.LEE, cap), move, cap)


def morse_map(D: PlanarDiagram, move: Move, cap: int = DEFAULT_CAP,
              C: Optional[GradedComplex] = None) -> Tuple[PlanarDiagram, ChainMap]:
    if move.kind not in MORSE:
        raise PatternMismatch(f"{move.kind} is not a Morse move")
    return apply_move(D, C or build_complex(D, Theory.LEE, cap), move, cap)


def canonical_transport(D: PlanarDiagram, move: Move, cap: int = DEFAULT_CAP) -> Fraction:
    """lambda with rho[s] = lambda [s~] for the first canonical class of ``D``."""
    _, F = reidemeister_map(D, move, cap)
    return Fraction(check_canonical_transport(F)[0])


def lee_isomorphism(F: ChainMap) -> bool:
    """True when ``F`` induces an isomorphism on Lee homology."""
    rank, src, dst = induced_rank(F)
    return rank == src == dst
