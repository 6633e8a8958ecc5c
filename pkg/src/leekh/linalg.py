"""Sparse exact linear algebra over the rationals.

Matrices are column lists of ``(row, value)`` pairs with ``int`` or
``Fraction`` values. Elimination keeps a list of reduced pivot columns; each
incoming column is cleared against earlier pivots in the order they were
created, so later pivots never reintroduce rows cleared by earlier ones.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

Number = object  # int or Fraction


class BadCuts(ValueError):
    pass


class RowMismatch(ValueError):
    pass


@dataclass
class SparseMatrixQ:
    rows: int
    cols: int
    columns: List[List[Tuple[int, object]]]

    def __post_init__(self):
        if len(self.columns) != self.cols:
            raise ValueError("column count mismatch")
        for col in self.columns:
            seen = set()
            for r, v in col:
                if not 0 <= r < self.rows:
                    raise IndexError(f"row {r} out of range")
                if v == 0:
                    raise ValueError("stored zero")
                if r in seen:
                    raise ValueError(f"duplicate row {r} in column")
                seen.add(r)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrixQ":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        cols = [[(i, rows[i][j]) for i in range(nr) if rows[i][j] != 0] for j in range(nc)]
        return cls(nr, nc, cols)

    @classmethod
    def from_dicts(cls, rows: int, columns: Sequence[Dict[int, object]]) -> "SparseMatrixQ":
        return cls(rows, len(columns), [sorted((r, v) for r, v in c.items() if v != 0)
                                        for c in columns])

    @classmethod
    def identity(cls, n: int) -> "SparseMatrixQ":
        return cls(n, n, [[(i, 1)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrixQ":
        return cls(rows, cols, [[] for _ in range(cols)])

    def transpose(self) -> "SparseMatrixQ":
        cols: List[List[Tuple[int, object]]] = [[] for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col:
                cols[i].append((j, v))
        return SparseMatrixQ(self.cols, self.rows, cols)

    def to_dense(self) -> List[List[object]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col:
                out[i][j] = v
        return out


@dataclass(frozen=True)
class RankProfile:
    cuts: Tuple[int, ...]
    ranks: Tuple[int, ...]


def _size(v) -> int:
    if isinstance(v, Fraction):
        return abs(v.numerator).bit_length() + v.denominator.bit_length()
    return abs(v).bit_length()


class Eliminator:
    """Incremental column echelon form; ``add`` returns True if the column is new."""

    def __init__(self):
        self.pivot_index: Dict[int, int] = {}  # pivot row -> position in pivots
        self.pivots: List[Dict[int, object]] = []
        self.pivot_rows: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, col: Dict[int, object]) -> Dict[int, object]:
        col = dict(col)
        heap = [self.pivot_index[r] for r in col if r in self.pivot_index]
        heapq.heapify(heap)
        done = set()
        while heap:
            k = heapq.heappop(heap)
            if k in done:
                continue
            done.add(k)
            p = self.pivots[k]
            prow = self.pivot_rows[k]
            a = col.get(prow)
            if not a:
                continue
            for r, v in p.items():
                nv = col.get(r, 0) - a * v
                if nv:
                    col[r] = nv
                    if r != prow and r in self.pivot_index:
                        kk = self.pivot_index[r]
                        if kk > k and kk not in done:
                            heapq.heappush(heap, kk)
                else:
                    col.pop(r, None)
        return col

    def add(self, col: Dict[int, object]) -> bool:
        col = self.reduce(col)
        if not col:
            return False
        # smallest coefficient size as pivot, ties by lowest row
        prow = min(col, key=lambda r: (_size(col[r]), r))
        a = col[prow]
        if a != 1:
            inv = Fraction(1) / a if not isinstance(a, Fraction) else 1 / a
            col = {r: _norm(v * inv) for r, v in col.items()}
        self.pivot_index[prow] = len(self.pivots)
        self.pivot_rows.append(prow)
        self.pivots.append(col)
        return True

    def contains(self, col: Dict[int, object]) -> bool:
        return not self.reduce(col)


def _norm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def _col_dict(col: Iterable[Tuple[int, object]]) -> Dict[int, object]:
    return {r: v for r, v in col}


def rank(M: SparseMatrixQ) -> int:
    E = Eliminator()
    for col in M.columns:
        E.add(_col_dict(col))
    return E.rank


def rank_profile(M: SparseMatrixQ, cuts: Sequence[int]) -> RankProfile:
    cuts = tuple(cuts)
    if any(b <= a for a, b in zip(cuts, cuts[1:])) or any(c < 0 or c > M.cols for c in cuts):
        raise BadCuts(f"cuts {cuts} must be increasing within 0..{M.cols}")
    E = Eliminator()
    ranks = []
    j = 0
    for c in cuts:
        while j < c:
            E.add(_col_dict(M.columns[j]))
            j += 1
        ranks.append(E.rank)
    return RankProfile(cuts, tuple(ranks))


def augmented_rank(A: SparseMatrixQ, B: SparseMatrixQ) -> int:
    if A.rows != B.rows:
        raise RowMismatch(f"{A.rows} rows vs {B.rows} rows")
    E = Eliminator()
    for col in A.columns:
        E.add(_col_dict(col))
    for col in B.columns:
        E.add(_col_dict(col))
    return E.rank


def dense_rank(rows: Sequence[Sequence]) -> int:
    """Textbook row reduction on a dense copy; used as an independent check."""
    m = [[Fraction(v) for v in row] for row in rows]
    if not m:
        return 0
    nr, nc = len(m), len(m[0])
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nr:
            break
    return r


def solve_in_span(E: Eliminator, target: Dict[int, object]) -> bool:
    return E.contains(target)
