"""Cube of resolutions: circles at each vertex and merge/split edges with signs.

Vertices are ints; bit ``l`` is the smoothing of crossing ``l``.
The 0-smoothing of ``X(a,b,c,d)`` joins a-b and c-d, the 1-smoothing joins
a-d and b-c, so at a positive crossing the 0-smoothing follows orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Tuple

from .diagram import DiagramError, PlanarDiagram


class BitLengthMismatch(DiagramError):
    pass


class EdgeKind(Enum):
    MERGE = "merge"
    SPLIT = "split"


@dataclass(frozen=True)
class Vertex:
    bits: Tuple[int, ...]

    @classmethod
    def from_int(cls, v: int, k: int) -> "Vertex":
        return cls(tuple((v >> l) & 1 for l in range(k)))

    def to_int(self) -> int:
        return sum(b << l for l, b in enumerate(self.bits))

    @property
    def weight(self) -> int:
        return sum(self.bits)


@dataclass(frozen=True)
class ResolvedDiagram:
    vertex: int
    circles: Tuple[Tuple[int, ...], ...]
    circle_of: Dict[int, int]

    @property
    def circle_count(self) -> int:
        return len(self.circles)


@dataclass(frozen=True)
class CubeEdge:
    source: int
    crossing: int
    kind: EdgeKind
    # merge: the two source circles and the target circle
    # split: the source circle and the two target circles
    source_circles: Tuple[int, ...]
    target_circles: Tuple[int, ...]
    sign: int

    @property
    def target(self) -> int:
        return self.source | (1 << self.crossing)


def edge_sign(v: int, l: int) -> int:
    return -1 if bin(v & ((1 << l) - 1)).count("1") % 2 else 1


def _as_int(D: PlanarDiagram, v) -> int:
    k = D.num_crossings
    if isinstance(v, Vertex):
        if len(v.bits) != k:
            raise BitLengthMismatch(f"vertex has {len(v.bits)} bits, diagram has {k} crossings")
        return v.to_int()
    if isinstance(v, (tuple, list)):
        if len(v) != k:
            raise BitLengthMismatch(f"vertex has {len(v)} bits, diagram has {k} crossings")
        return sum(int(b) << l for l, b in enumerate(v))
    v = int(v)
    if v < 0 or v >= (1 << k):
        raise BitLengthMismatch(f"vertex {v} out of range for {k} crossings")
    return v


def resolve(D: PlanarDiagram, v) -> ResolvedDiagram:
    """Circles of the resolution at ``v``, ordered by smallest arc label."""
    v = _as_int(D, v)
    parent = {a: a for a in D.successor}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            if rx < ry:
                parent[ry] = rx
            else:
                parent[rx] = ry

    for l, (a, b, c, d) in enumerate(D.crossings):
        if (v >> l) & 1:
            union(a, d)
            union(b, c)
        else:
            union(a, b)
            union(c, d)
    groups: Dict[int, List[int]] = {}
    for a in sorted(parent):
        groups.setdefault(find(a), []).append(a)
    circles = tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: g[0]))
    circle_of = {a: i for i, g in enumerate(circles) for a in g}
    return ResolvedDiagram(v, circles, circle_of)


def oriented_resolution(D: PlanarDiagram) -> Vertex:
    return Vertex(tuple(0 if s > 0 else 1 for s in D.signs))


def oriented_vertex(D: PlanarDiagram) -> int:
    return oriented_resolution(D).to_int()


def vertices_by_weight(k: int) -> Iterator[int]:
    """All vertices, grouped by weight, increasing within each weight."""
    by_weight: List[List[int]] = [[] for _ in range(k + 1)]
    for v in range(1 << k):
        by_weight[bin(v).count("1")].append(v)
    for group in by_weight:
        yield from group


class Cube:
    """All resolutions of a diagram, computed once and cached."""

    def __init__(self, D: PlanarDiagram):
        self.diagram = D
        self.k = D.num_crossings
        self.res: List[ResolvedDiagram] = [resolve(D, v) for v in range(1 << self.k)]

    def circle_count(self, v: int) -> int:
        return self.res[v].circle_count

    def edge(self, v: int, l: int) -> CubeEdge:
        if (v >> l) & 1:
            raise ValueError("edge source must have bit 0 at the changed crossing")
        a, b, c, d = self.diagram.crossings[l]
        src = self.res[v]
        tgt = self.res[v | (1 << l)]
        sign = edge_sign(v, l)
        if tgt.circle_count < src.circle_count:
            i, j = sorted((src.circle_of[a], src.circle_of[c]))
            return CubeEdge(v, l, EdgeKind.MERGE, (i, j), (tgt.circle_of[a],), sign)
        i = src.circle_of[a]
        j1, j2 = sorted((tgt.circle_of[a], tgt.circle_of[b]))
        return CubeEdge(v, l, EdgeKind.SPLIT, (i,), (j1, j2), sign)

    def edges(self) -> Iterator[CubeEdge]:
        for v in range(1 << self.k):
            for l in range(self.k):
                if not (v >> l) & 1:
                    yield self.edge(v, l)

    def total_dimension(self) -> int:
        return sum(1 << r.circle_count for r in self.res)


def edges(D: PlanarDiagram) -> List[CubeEdge]:
    return list(Cube(D).edges())


def estimate_dimension(D: PlanarDiagram) -> int:
    return Cube(D).total_dimension()
