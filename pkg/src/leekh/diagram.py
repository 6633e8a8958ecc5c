"""
Oriented link diagrams: PD codes, braid closures, mirror images,
connected sums and the bundled knot table.

A crossing ``X(a, b, c, d)`` lists its four arcs counterclockwise, starting
with the incoming under-strand ``a``; the under-strand runs ``a -> c``.
A crossing is positive when the over-strand runs ``d -> b``.

Crossingless components are stored as one-arc components whose label does
not occur in any crossing.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Crossing = Tuple[int, int, int, int]


class DiagramError(ValueError):
    pass


class MalformedToken(DiagramError):
    pass


class ArcLabelUsedWrongNumberOfTimes(DiagramError):
    pass


class InconsistentOrientation(DiagramError):
    pass


class EmptyWord(DiagramError):
    pass


class NotAKnot(DiagramError):
    pass


class FileUnreadable(DiagramError):
    pass


class BadRow(DiagramError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


class DuplicateName(DiagramError):
    pass


@dataclass(frozen=True)
class PlanarDiagram:
    """An oriented link diagram.

    ``components`` gives each component as the cyclic sequence of its arcs in
    orientation order. ``over_forward[i]`` is True when the over-strand of
    crossing ``i`` runs d -> b.
    """

    crossings: Tuple[Crossing, ...]
    components: Tuple[Tuple[int, ...], ...]
    over_forward: Tuple[bool, ...] = field(repr=False)
    signs: Tuple[int, ...] = field(init=False, repr=False)
    successor: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "signs",
                           tuple(1 if f else -1 for f in self.over_forward))
        succ = {}
        for comp in self.components:
            for i, arc in enumerate(comp):
                succ[arc] = comp[(i + 1) % len(comp)]
        object.__setattr__(self, "successor", succ)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def num_crossings(self) -> int:
        return len(self.crossings)

    @property
    def num_components(self) -> int:
        return len(self.components)

    @property
    def crossing_signs(self) -> Tuple[int, ...]:
        return self.signs

    @property
    def crossingless_components(self) -> int:
        used = {x for c in self.crossings for x in c}
        return sum(1 for comp in self.components
                   if len(comp) == 1 and comp[0] not in used)

    @property
    def arcs(self) -> List[int]:
        return sorted(self.successor)

    def is_knot(self) -> bool:
        return len(self.components) == 1

    def head_slot(self, i: int) -> Tuple[int, int]:
        """Slots (under, over) through which strands enter crossing ``i``."""
        return (0, 3) if self.over_forward[i] else (0, 1)

    def tail_slot(self, i: int) -> Tuple[int, int]:
        return (2, 1) if self.over_forward[i] else (2, 3)

    def arc_ends(self) -> Dict[int, Dict[str, Tuple[int, int]]]:
        """For every arc touching a crossing: ``{'head': (i, slot), 'tail': (i, slot)}``."""
        ends: Dict[int, Dict[str, Tuple[int, int]]] = {}
        for i, x in enumerate(self.crossings):
            for slot in self.head_slot(i):
                ends.setdefault(x[slot], {})["head"] = (i, slot)
            for slot in self.tail_slot(i):
                ends.setdefault(x[slot], {})["tail"] = (i, slot)
        return ends

    def is_alternating(self) -> bool:
        """True when every strand alternates between passing over and under."""
        ends = self.arc_ends()
        for comp in self.components:
            kinds = [ends[a]["head"][1] != 0 for a in comp if a in ends]
            if any(x == y for x, y in zip(kinds, kinds[1:] + kinds[:1])):
                return False
        return True

    def pd_string(self) -> str:
        body = " ".join("X(%d,%d,%d,%d)" % c for c in self.crossings)
        if self.needs_explicit_components():
            comps = "".join("(" + " ".join(map(str, c)) + ")"
                            for c in self.components)
            return (body + " | components: " + comps).strip()
        return body

    def needs_explicit_components(self) -> bool:
        if len(self.components) != 1 or not self.crossings:
            return True
        comp = self.components[0]
        return comp != tuple(range(1, len(comp) + 1))

    def __str__(self) -> str:
        return self.pd_string()


# --------------------------------------------------------------------------
# construction and validation


def _orient_overs(crossings: Sequence[Crossing], succ: Dict[int, int]) -> List[bool]:
    pred = {v: k for k, v in succ.items()}
    n = len(crossings)
    forward: List[Optional[bool]] = [None] * n
    for i, (a, b, c, d) in enumerate(crossings):
        if succ.get(a) != c:
            raise InconsistentOrientation(
                f"crossing {i + 1}: under-strand {a}->{c} disagrees with orientation")
        fwd_ok = succ.get(d) == b
        back_ok = succ.get(b) == d
        if not (fwd_ok or back_ok):
            raise InconsistentOrientation(
                f"crossing {i + 1}: neither {d}->{b} nor {b}->{d} follows orientation")
        if fwd_ok != back_ok:
            forward[i] = fwd_ok

    # two-arc loops are ambiguous by successor alone; resolve them by requiring
    # every arc to have exactly one head slot and one tail slot
    def slot_roles():
        heads: Dict[int, int] = {}
        tails: Dict[int, int] = {}
        for i, (a, b, c, d) in enumerate(crossings):
            heads[a] = heads.get(a, 0) + 1
            tails[c] = tails.get(c, 0) + 1
            if forward[i] is True:
                heads[d] = heads.get(d, 0) + 1
                tails[b] = tails.get(b, 0) + 1
            elif forward[i] is False:
                heads[b] = heads.get(b, 0) + 1
                tails[d] = tails.get(d, 0) + 1
        return heads, tails

    while any(f is None for f in forward):
        heads, tails = slot_roles()
        progress = False
        for i, (a, b, c, d) in enumerate(crossings):
            if forward[i] is not None:
                continue
            if heads.get(d, 0) >= 1 or tails.get(b, 0) >= 1:
                forward[i] = False
                progress = True
            elif heads.get(b, 0) >= 1 or tails.get(d, 0) >= 1:
                forward[i] = True
                progress = True
        if not progress:
            i = forward.index(None)
            a, b, c, d = crossings[i]
            forward[i] = pred.get(b) == d
    return [bool(f) for f in forward]


def make_diagram(crossings: Iterable[Sequence[int]],
                 components: Optional[Iterable[Sequence[int]]] = None) -> PlanarDiagram:
    """Validate crossings and components and compute crossing signs.

    Without ``components`` the crossings must use arcs ``1..2n`` and describe
    a knot whose arcs follow ``i -> i+1 (mod 2n)``.
    """
    xs = tuple(tuple(int(v) for v in c) for c in crossings)
    for c in xs:
        if len(c) != 4:
            raise MalformedToken(f"crossing {c} does not have four arcs")
        if any(v <= 0 for v in c):
            raise MalformedToken(f"crossing {c} has a non-positive arc label")
    counts: Dict[int, int] = {}
    for c in xs:
        for v in c:
            counts[v] = counts.get(v, 0) + 1
    bad = sorted(v for v, k in counts.items() if k != 2)
    if bad:
        raise ArcLabelUsedWrongNumberOfTimes(
            f"arc label(s) {bad} do not occur exactly twice")

    if components is None:
        if not xs:
            comps = ((1,),)
        else:
            labels = sorted(counts)
            if labels != list(range(1, len(labels) + 1)):
                raise DiagramError(
                    "arcs must be labelled 1..2n unless components are given")
            comps = (tuple(labels),)
    else:
        comps = tuple(tuple(int(v) for v in comp) for comp in components)
        if not comps and not xs:
            comps = ((1,),)

    seen = [v for comp in comps for v in comp]
    if len(seen) != len(set(seen)):
        raise DiagramError("an arc label occurs in two component positions")
    if any(len(comp) == 0 for comp in comps):
        raise DiagramError("empty component")
    missing = set(counts) - set(seen)
    if missing:
        raise DiagramError(f"arcs {sorted(missing)} belong to no component")
    for comp in comps:
        free = [v for v in comp if v not in counts]
        if free and len(comp) != 1:
            raise ArcLabelUsedWrongNumberOfTimes(
                f"arc(s) {free} appear in no crossing")

    succ = {}
    for comp in comps:
        for i, arc in enumerate(comp):
            succ[arc] = comp[(i + 1) % len(comp)]
    forward = _orient_overs(xs, succ)
    # an arc enters at most one crossing from below and leaves at most one
    for slot, role in ((0, "incoming"), (2, "outgoing")):
        labels = [c[slot] for c in xs]
        dup = sorted({v for v in labels if labels.count(v) > 1})
        if dup:
            raise ArcLabelUsedWrongNumberOfTimes(
                f"arc label(s) {dup} used twice as the {role} under-strand")
    return PlanarDiagram(xs, comps, tuple(forward))


_TOKEN = re.compile(r"X\s*[\(\[]\s*([^\)\]]*)[\)\]]")


def parse_pd(text: str) -> PlanarDiagram:
    """Parse ``X(a,b,c,d)`` tokens with an optional ``| components: (..)(..)`` suffix."""
    text = text.strip()
    comp_part = None
    if "|" in text:
        text, comp_part = text.split("|", 1)
    crossings = []
    pos = 0
    body = text.strip()
    for m in _TOKEN.finditer(body):
        gap = body[pos:m.start()].strip().strip(",")
        if gap:
            raise MalformedToken(f"unexpected text {gap!r}")
        try:
            vals = [int(v) for v in m.group(1).split(",")]
        except ValueError:
            raise MalformedToken(f"bad token {m.group(0)!r}") from None
        if len(vals) != 4:
            raise MalformedToken(f"bad token {m.group(0)!r}")
        crossings.append(vals)
        pos = m.end()
    tail = body[pos:].strip().strip(",")
    if tail:
        raise MalformedToken(f"unexpected text {tail!r}")

    components = None
    if comp_part is not None:
        comp_part = comp_part.strip()
        if comp_part.startswith("components:"):
            comp_part = comp_part[len("components:"):]
        groups = re.findall(r"\(([^\)]*)\)", comp_part)
        if not groups and comp_part.strip():
            raise MalformedToken(f"bad components {comp_part!r}")
        try:
            components = [[int(v) for v in g.replace(",", " ").split()] for g in groups]
        except ValueError:
            raise MalformedToken(f"bad components {comp_part!r}") from None
    return make_diagram(crossings, components)


def relabel(D: PlanarDiagram) -> Tuple[PlanarDiagram, Dict[int, int]]:
    """Relabel arcs 1..N in traversal order, keeping crossing and component order.

    Each component starts at its smallest label. Returns the new diagram and
    the old -> new label map.
    """
    mapping: Dict[int, int] = {}
    new_comps = []
    nxt = 1
    for comp in D.components:
        k = comp.index(min(comp))
        rotated = comp[k:] + comp[:k]
        new = []
        for arc in rotated:
            mapping[arc] = nxt
            new.append(nxt)
            nxt += 1
        new_comps.append(tuple(new))
    xs = tuple(tuple(mapping[v] for v in c) for c in D.crossings)
    return PlanarDiagram(xs, tuple(new_comps), D.over_forward), mapping


def diagram_from_successor(crossings: Sequence[Crossing], over_forward: Sequence[bool],
                           succ: Dict[int, int]) -> PlanarDiagram:
    """Assemble a diagram from raw data and relabel it canonically.

    Components are ordered by their smallest original label.
    """
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
    D = PlanarDiagram(tuple(tuple(c) for c in crossings), tuple(comps), tuple(over_forward))
    return relabel(D)[0]


# --------------------------------------------------------------------------
# braids


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: Tuple[int, ...]

    def __post_init__(self):
        if self.strands < 1:
            raise DiagramError("a braid needs at least one strand")
        for g in self.letters:
            if g == 0 or abs(g) >= self.strands:
                raise DiagramError(f"generator {g} invalid on {self.strands} strands")

    def mirror(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-g for g in self.letters))

    def __str__(self) -> str:
        return "strands=%d %s" % (self.strands, " ".join(map(str, self.letters)))


def parse_braid(text: str) -> BraidWord:
    """Parse ``strands=<n> 1 -2 1 -2``; without a prefix, strands = max|i| + 1."""
    text = text.strip().strip('"')
    strands = None
    m = re.match(r"strands\s*=\s*(\d+)\s*", text)
    if m:
        strands = int(m.group(1))
        text = text[m.end():]
    text = text.strip().strip("[]")
    try:
        letters = tuple(int(t) for t in re.split(r"[\s,]+", text) if t)
    except ValueError:
        raise MalformedToken(f"bad braid word {text!r}") from None
    if strands is None:
        strands = max((abs(g) for g in letters), default=0) + 1
    return BraidWord(strands, letters)


def from_braid(word: BraidWord) -> PlanarDiagram:
    """PD of the braid closure; positive letters give positive crossings."""
    if not word.letters:
        raise EmptyWord("braid word has no letters")
    n = word.strands
    bottom = list(range(1, n + 1))
    cur = list(bottom)
    nxt = n + 1
    crossings: List[List[int]] = []
    forward: List[bool] = []
    succ: Dict[int, int] = {}
    for g in word.letters:
        p = abs(g) - 1
        sw, se = cur[p], cur[p + 1]
        nw, ne = nxt, nxt + 1
        nxt += 2
        if g > 0:
            # over-strand SW -> NE, under SE -> NW
            crossings.append([se, ne, nw, sw])
            forward.append(True)
            succ[sw] = ne
            succ[se] = nw
        else:
            # over-strand SE -> NW, under SW -> NE
            crossings.append([sw, se, ne, nw])
            forward.append(False)
            succ[sw] = ne
            succ[se] = nw
        cur[p], cur[p + 1] = nw, ne

    # closing arcs: the top arc at each position continues as the bottom arc
    ident = {}
    for p in range(n):
        ident[bottom[p]] = cur[p]

    def canon(x):
        while x in ident and ident[x] != x:
            x = ident[x]
        return x

    crossings = [[canon(v) for v in c] for c in crossings]
    new_succ = {}
    for k, v in succ.items():
        new_succ[canon(k)] = canon(v)
    for p in range(n):
        arc = canon(bottom[p])
        if arc not in new_succ:
            new_succ[arc] = arc  # untouched strand closes into a crossingless circle
    return diagram_from_successor(crossings, forward, new_succ)


# --------------------------------------------------------------------------
# transformations


def mirror(D: PlanarDiagram) -> PlanarDiagram:
    """Change every crossing; signs negate and the orientation is kept."""
    xs = []
    for (a, b, c, d), fwd in zip(D.crossings, D.over_forward):
        xs.append((d, a, b, c) if fwd else (b, c, d, a))
    return PlanarDiagram(tuple(xs), D.components, tuple(not f for f in D.over_forward))


def connected_sum(D1: PlanarDiagram, D2: PlanarDiagram,
                  arc1: Optional[int] = None, arc2: Optional[int] = None) -> PlanarDiagram:
    """Splice two knot diagrams at the given arcs (default: the first arcs)."""
    if not D1.is_knot() or not D2.is_knot():
        raise NotAKnot("connected sum needs two knot diagrams")
    if not D1.crossings:
        return relabel(D2)[0]
    if not D2.crossings:
        return relabel(D1)[0]
    arc1 = D1.components[0][0] if arc1 is None else arc1
    arc2 = D2.components[0][0] if arc2 is None else arc2
    if arc1 not in D1.successor or arc2 not in D2.successor:
        raise DiagramError("splice arcs must belong to the diagrams")

    shift = max(D1.successor) + 1
    x1 = [list(c) for c in D1.crossings]
    x2 = [[v + shift for v in c] for c in D2.crossings]
    ends1 = D1.arc_ends()[arc1]
    ends2 = D2.arc_ends()[arc2]
    new_a = shift + max(D2.successor) + 1   # tail of arc1 -> head of arc2
    new_b = new_a + 1                       # tail of arc2 -> head of arc1
    i, s = ends1["tail"]
    x1[i][s] = new_a
    i, s = ends1["head"]
    x1[i][s] = new_b
    i, s = ends2["head"]
    x2[i][s] = new_a
    i, s = ends2["tail"]
    x2[i][s] = new_b

    # the successor relation follows from the crossings and their over directions
    xs = [tuple(c) for c in x1 + x2]
    fwd = list(D1.over_forward) + list(D2.over_forward)
    succ2 = {}
    for (a, b, c, d), f in zip(xs, fwd):
        succ2[a] = c
        if f:
            succ2[d] = b
        else:
            succ2[b] = d
    return diagram_from_successor(xs, fwd, succ2)


# --------------------------------------------------------------------------
# knot tables


@dataclass(frozen=True)
class KnotTableEntry:
    name: str
    crossings: int
    pd: str
    braid: Optional[str] = None
    sigma_ref: Optional[int] = None
    s_ref: Optional[int] = None

    def diagram(self) -> PlanarDiagram:
        return parse_pd(self.pd)

    def braid_word(self) -> Optional[BraidWord]:
        return parse_braid(self.braid) if self.braid else None


TABLE_HEADER = ["name", "crossings", "pd", "braid", "sigma_ref", "s_ref"]


def _opt_int(text: str) -> Optional[int]:
    text = text.strip()
    return int(text) if text else None


def load_table(path) -> List[KnotTableEntry]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r and not (len(r) == 1 and not r[0].strip())]
    if not rows:
        return []
    if [h.strip() for h in rows[0]] != TABLE_HEADER:
        raise BadRow(1, "header must be " + ",".join(TABLE_HEADER))
    entries = []
    names = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(TABLE_HEADER):
            raise BadRow(lineno, f"expected {len(TABLE_HEADER)} fields")
        name = row[0].strip()
        if not name:
            raise BadRow(lineno, "empty name")
        if name in names:
            raise DuplicateName(f"duplicate name {name!r} on line {lineno}")
        try:
            entry = KnotTableEntry(name, int(row[1]), row[2].strip(),
                                   row[3].strip() or None,
                                   _opt_int(row[4]), _opt_int(row[5]))
            D = entry.diagram()
            if entry.braid:
                entry.braid_word()
        except (ValueError, DiagramError) as exc:
            raise BadRow(lineno, str(exc)) from None
        if not D.is_knot():
            raise BadRow(lineno, "pd does not describe a knot")
        names.add(name)
        entries.append(entry)
    return entries


def bundled_table_path():
    return resources.files("leekh") / "data" / "knots.csv"


def load_bundled_table() -> List[KnotTableEntry]:
    with resources.as_file(bundled_table_path()) as p:
        return load_table(p)
