"""Independent reference computations used by several test modules."""

from __future__ import annotations

from typing import Dict

Poly = Dict[int, int]


def _mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _circles(crossings, state) -> int:
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for l, (a, b, c, d) in enumerate(crossings):
        pairs = ((a, d), (b, c)) if (state >> l) & 1 else ((a, b), (c, d))
        for x, y in pairs:
            parent[find(x)] = find(y)
    return len({find(x) for x in parent})


def unnormalized_jones(D) -> Poly:
    """State sum (-1)^n- q^(n+ - 2n-) sum_s (-q)^|s| (q + 1/q)^circles."""
    k = D.num_crossings
    total: Poly = {}
    for s in range(1 << k):
        r = bin(s).count("1")
        term: Poly = {r: (-1) ** r}
        circles = (_circles(D.crossings, s) if k else 0) + D.crossingless_components
        for _ in range(circles):
            term = _mul(term, {1: 1, -1: 1})
        for e, v in term.items():
            total[e] = total.get(e, 0) + v
    shift = D.n_plus - 2 * D.n_minus
    sign = (-1) ** D.n_minus
    return {e + shift: sign * v for e, v in total.items() if v}


def euler_characteristic(kh) -> Poly:
    out: Poly = {}
    for (i, j), v in kh.items():
        out[j] = out.get(j, 0) + (-1) ** i * v
    return {k: v for k, v in out.items() if v}


def divide_by_q_plus_inverse(p: Poly) -> Poly:
    """Exact division by q + 1/q, from the top degree down."""
    p = dict(p)
    out: Poly = {}
    while p:
        top = max(p)
        c = p[top]
        out[top - 1] = c
        for e in (top, top - 2):
            p[e] = p.get(e, 0) - c
            if not p[e]:
                del p[e]
    return out


def determinant_from_jones(D) -> int:
    J = divide_by_q_plus_inverse(unnormalized_jones(D))
    re = im = 0
    for e, v in J.items():
        r, i = ((1, 0), (0, 1), (-1, 0), (0, -1))[e % 4]
        re += v * r
        im += v * i
    return abs(re) + abs(im)  # exactly one of them is nonzero for a knot
