"""Knot signature from a braid word via the Seifert surface of the closed braid.

The surface has one disk per strand and one twisted band per letter. A
first homology basis is given by loops through consecutive bands in the same
column; linking numbers of these loops with their push-offs depend only on
band signs and on how loops in neighbouring columns interleave.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .diagram import BraidWord, NotAKnot, from_braid

# Chosen once so that the positive trefoil has signature +2.
SIGN_CONVENTION = -1


class SingularForm(ValueError):
    pass


SeifertMatrix = List[List[int]]


def _generators(word: BraidWord) -> List[Tuple[int, int, int]]:
    """(column, first letter index, next letter index in that column)."""
    by_col: Dict[int, List[int]] = {}
    for pos, g in enumerate(word.letters):
        by_col.setdefault(abs(g), []).append(pos)
    gens = []
    for col in sorted(by_col):
        ps = by_col[col]
        for a, b in zip(ps, ps[1:]):
            gens.append((col, a, b))
    return gens


def seifert_matrix(word: BraidWord) -> SeifertMatrix:
    if not word.letters:
        if word.strands == 1:
            return []
        raise NotAKnot("empty braid on several strands is a split link")
    if not from_braid(word).is_knot():
        raise NotAKnot("braid closure has more than one component")
    cols = {abs(g) for g in word.letters}
    if cols != set(range(1, word.strands)):
        raise NotAKnot("braid closure is split")
    sgn = [1 if g > 0 else -1 for g in word.letters]
    gens = _generators(word)
    n = len(gens)
    V = [[0] * n for _ in range(n)]
    for u, (cu, a, b) in enumerate(gens):
        if sgn[a] == sgn[b]:
            V[u][u] = -sgn[a]
        for w, (cw, c, d) in enumerate(gens):
            if w == u:
                continue
            if cw == cu and c == b:
                # w follows u in the same column and they share band b
                if sgn[b] > 0:
                    V[u][w] = 1
                else:
                    V[w][u] = -1
            elif cw == cu + 1:
                if a < c < b < d:
                    V[u][w] = -1
                elif c < a < d < b:
                    V[w][u] = 1
    return V


def _sym(V: SeifertMatrix) -> List[List[Fraction]]:
    n = len(V)
    return [[Fraction(V[i][j] + V[j][i]) for j in range(n)] for i in range(n)]


def symmetric_signature(S: List[List[Fraction]]) -> Tuple[int, int, int]:
    """(positive, negative, zero) counts by exact congruence diagonalization."""
    A = [row[:] for row in S]
    n = len(A)
    pos = neg = zero = 0
    k = 0
    while k < n:
        if A[k][k] == 0:
            j = next((j for j in range(k + 1, n) if A[j][j] != 0), None)
            if j is not None:
                A[k], A[j] = A[j], A[k]
                for row in A:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if A[k][j] != 0), None)
                if j is None:
                    zero += 1
                    k += 1
                    continue
                # replace e_k by e_k + e_j to create a nonzero diagonal entry
                for c in range(n):
                    A[k][c] += A[j][c]
                for r in range(n):
                    A[r][k] += A[r][j]
        p = A[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for r in range(k + 1, n):
            f = A[r][k] / p
            if f:
                for c in range(k, n):
                    A[r][c] -= f * A[k][c]
        for r in range(k + 1, n):
            A[k][r] = Fraction(0)
            A[r][k] = Fraction(0)
        k += 1
    return pos, neg, zero


def determinant(M: List[List[Fraction]]) -> Fraction:
    A = [row[:] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return det


def signature(V: SeifertMatrix) -> int:
    S = _sym(V)
    pos, neg, zero = symmetric_signature(S)
    if zero:
        raise SingularForm("V + V^T is singular")
    return SIGN_CONVENTION * (pos - neg)


def knot_determinant(V: SeifertMatrix) -> int:
    return abs(int(determinant(_sym(V)))) if V else 1


def braid_signature(word: BraidWord) -> int:
    return signature(seifert_matrix(word))
