"""Canonical Lee cycles built from the oriented resolution.

Circles of the oriented resolution that meet at a crossing must carry
different labels from {alpha, beta}; for a connected circle graph this leaves
exactly two labelings, one for each orientation of a knot.
With alpha = v- + v+ and beta = v- - v+ each labeling expands to a cycle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .complex import GradedComplex, apply_differential
from .cube import oriented_vertex, resolve
from .diagram import DiagramError, PlanarDiagram
from .linalg import Eliminator
from .reduction import ReducedComplex

ALPHA, BETA = "alpha", "beta"


class DisconnectedAdjacency(DiagramError):
    pass


class NotACycle(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalGenerator:
    vertex: int
    coloring: Tuple[str, ...]
    expanded: Dict[int, int]


def circle_graph(D: PlanarDiagram) -> Tuple[int, List[Set[int]]]:
    """Oriented vertex and the adjacency sets of its circles."""
    o = oriented_vertex(D)
    res = resolve(D, o)
    adj: List[Set[int]] = [set() for _ in res.circles]
    for l, (a, b, c, d) in enumerate(D.crossings):
        # the two smoothing arcs at this crossing lie on these circles
        u = res.circle_of[a]
        w = res.circle_of[c] if not (o >> l) & 1 else res.circle_of[b]
        if u == w:
            raise DiagramError(f"crossing {l + 1} touches a single oriented circle")
        adj[u].add(w)
        adj[w].add(u)
    return o, adj


def two_colorings(adj: List[Set[int]]) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    n = len(adj)
    color: List[Optional[int]] = [None] * n
    color[0] = 0
    todo = deque([0])
    while todo:
        u = todo.popleft()
        for w in adj[u]:
            if color[w] is None:
                color[w] = 1 - color[u]
                todo.append(w)
            elif color[w] == color[u]:
                raise DiagramError("circle graph is not bipartite")
    if any(c is None for c in color):
        raise DisconnectedAdjacency("circles of the oriented resolution are not all linked "
                                    "by crossings")
    first = tuple(ALPHA if c == 0 else BETA for c in color)
    second = tuple(BETA if c == 0 else ALPHA for c in color)
    return first, second


def expand(C: GradedComplex, vertex: int, coloring: Tuple[str, ...]) -> Dict[int, int]:
    """Tensor product of alpha/beta labels written in the v+/v- basis."""
    r = len(coloring)
    base = C.offset[vertex]
    out = {}
    for w in range(1 << r):
        sign = 1
        for i, col in enumerate(coloring):
            if col == BETA and (w >> (r - 1 - i)) & 1:
                sign = -sign
        out[base + w] = sign
    return out


def canonical_generators(C: GradedComplex) -> Tuple[CanonicalGenerator, CanonicalGenerator]:
    D = C.diagram
    o, adj = circle_graph(D)
    first, second = two_colorings(adj)
    return (CanonicalGenerator(o, first, expand(C, o, first)),
            CanonicalGenerator(o, second, expand(C, o, second)))


def _check_cycle(C: GradedComplex, g: Dict[int, object]) -> None:
    if apply_differential(C, g):
        raise NotACycle("chain is not a cycle")


def class_filtration_grading(C: GradedComplex, g: Dict[int, object]) -> int:
    """Largest q with [g] represented inside F_q, by rank tests on ``C``."""
    _check_cycle(C, g)
    if not g:
        raise ValueError("zero chain")
    deg = C.gr[next(iter(g))]
    E = Eliminator()
    for x in range(C.dimension):
        if C.gr[x] == deg - 1 and C.d[x]:
            E.add(C.d[x])
    if E.contains(g):
        raise ValueError("chain is a boundary")
    gens = sorted((x for x in range(C.dimension) if C.gr[x] == deg),
                  key=lambda x: -C.q[x])
    top = C.q[gens[0]]
    level = top + 2
    j = 0
    # add F_q for descending q until g lies in F_q + boundaries
    while True:
        level -= 2
        while j < len(gens) and C.q[gens[j]] >= level:
            E.add({gens[j]: 1})
            j += 1
        if E.contains(g):
            return level


def class_filtration_grading_reduced(R: ReducedComplex, g: Dict[int, object]) -> int:
    """Same grading computed after projecting ``g`` onto a cancelled complex."""
    h = R.project(g)
    if not h:
        raise ValueError("chain projects to zero")
    deg = R.gr[next(iter(h))]
    E = Eliminator()
    for x in R.gens:
        if R.gr[x] == deg - 1:
            E.add(R.d[x])
    gens = sorted((x for x in R.gens if R.gr[x] == deg), key=lambda x: -R.q[x])
    level = R.q[gens[0]] + 2
    j = 0
    while True:
        level -= 2
        while j < len(gens) and R.q[gens[j]] >= level:
            E.add({gens[j]: 1})
            j += 1
        if E.contains(h):
            return level


@dataclass(frozen=True)
class SummandSplit:
    odd: List[int]      # q = n + 2 mod 4
    even: List[int]     # q = n mod 4
    preserved: bool
    sum_in: str         # "odd" or "even"
    difference_in: str


def summand_split(C: GradedComplex) -> SummandSplit:
    n = C.diagram.num_components
    odd = [x for x in range(C.dimension) if (C.q[x] - n - 2) % 4 == 0]
    even = [x for x in range(C.dimension) if (C.q[x] - n) % 4 == 0]
    part = {x: 0 for x in odd}
    part.update({x: 1 for x in even})
    preserved = all(part[x] == part[y] for x, y, _ in C.entries())
    g1, g2 = canonical_generators(C)
    plus = {k: g1.expanded.get(k, 0) + g2.expanded.get(k, 0) for k in g1.expanded}
    minus = {k: g1.expanded.get(k, 0) - g2.expanded.get(k, 0) for k in g1.expanded}

    def where(v):
        sides = {part[k] for k, c in v.items() if c}
        if len(sides) != 1:
            raise AssertionError("canonical combination straddles both summands")
        return "odd" if sides.pop() == 0 else "even"

    return SummandSplit(odd, even, preserved, where(plus), where(minus))
