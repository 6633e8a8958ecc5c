"""Gaussian elimination (cancellation) of chain complexes.

Cancelling an entry ``d x = c*y + ...`` with ``q(x) == q(y)`` removes ``x``
and ``y`` and replaces each entry ``z -> w`` by ``z -> w`` minus
``(z -> y) * (x -> w) / c``. When the differential never lowers ``q`` and the
pivot keeps ``q``, the result is a filtered chain homotopy equivalence, so
both the homology and its induced filtration survive.

Once no ``q``-preserving entry is left, the generators that remain are a basis
of the homology of the associated graded complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .complex import GradedComplex


@dataclass
class ReducedComplex:
    """A complex on a subset of the original generators."""

    gens: List[int]
    gr: Dict[int, int]
    q: Dict[int, int]
    d: Dict[int, Dict[int, object]]
    # (x, y, c, snapshot of d x without y) in cancellation order
    log: Optional[List[Tuple[int, int, object, Dict[int, object]]]] = field(default=None, repr=False)

    def by_degree(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for x in self.gens:
            out.setdefault(self.gr[x], []).append(x)
        return out

    def project(self, chain: Dict[int, object]) -> Dict[int, object]:
        """Image of a chain under the projection onto the reduced complex."""
        if self.log is None:
            raise RuntimeError("reduction was run without a log")
        g = {k: v for k, v in chain.items() if v}
        for x, y, c, dx in self.log:
            g.pop(x, None)
            a = g.pop(y, None)
            if a:
                f = Fraction(a) / c if not isinstance(c, int) or c not in (1, -1) else a * c
                for w, b in dx.items():
                    nv = g.get(w, 0) - f * b
                    if nv:
                        g[w] = nv
                    else:
                        g.pop(w, None)
        alive = set(self.gens)
        assert all(k in alive for k in g)
        return g


class _Engine:
    def __init__(self, q, out: Dict[int, Dict[int, object]], record: bool):
        self.q = q
        self.out = out
        self.inn: Dict[int, Set[int]] = {x: set() for x in out}
        for x, col in out.items():
            for y in col:
                self.inn[y].add(x)
        self.log = [] if record else None

    def cancel(self, x: int, y: int) -> None:
        out, inn = self.out, self.inn
        ox = out.pop(x)
        c = ox.pop(y)
        iy = inn.pop(y)
        iy.discard(x)
        for w in ox:
            inn[w].discard(x)
        for z in inn.pop(x):
            del out[z][x]
        for w in out.pop(y):
            inn[w].discard(y)
        unit = isinstance(c, int) and c in (1, -1)
        for z in iy:
            oz = out[z]
            a = oz.pop(y)
            f = a * c if unit else Fraction(a) / c
            for w, b in ox.items():
                nv = oz.get(w, 0) - f * b
                if nv:
                    if isinstance(nv, Fraction) and nv.denominator == 1:
                        nv = nv.numerator
                    if w not in oz:
                        inn[w].add(z)
                    oz[w] = nv
                elif w in oz:
                    del oz[w]
                    inn[w].discard(z)
        if self.log is not None:
            self.log.append((x, y, c, ox))

    def pass_(self, units_only: bool, filtered: bool) -> int:
        q, out, inn = self.q, self.out, self.inn
        count = 0
        for x in list(out):
            ox = out.get(x)
            if not ox:
                continue
            qx = q[x]
            best = None
            best_cost = None
            for y, c in ox.items():
                if filtered and q[y] != qx:
                    continue
                if units_only and not (isinstance(c, int) and c in (1, -1)):
                    continue
                cost = len(inn[y])
                if best is None or cost < best_cost:
                    best, best_cost = y, cost
                    if cost <= 1:
                        break
            if best is not None:
                self.cancel(x, best)
                count += 1
        return count


def cancel_complex(C: GradedComplex, filtered: bool = True, record: bool = False,
                   gens: Optional[List[int]] = None) -> ReducedComplex:
    """Cancel ``q``-preserving entries (all entries when ``filtered`` is False)."""
    if gens is None:
        gens = list(range(C.dimension))
    keep = set(gens)
    out = {x: {y: c for y, c in C.d[x].items() if y in keep} for x in gens}
    eng = _Engine(C.q, out, record)
    for units_only in (True, False):
        while eng.pass_(units_only, filtered):
            pass
    left = sorted(eng.out)
    return ReducedComplex(left, {x: C.gr[x] for x in left}, {x: C.q[x] for x in left},
                          {x: eng.out[x] for x in left}, eng.log)
