"""Brute-force reference computations over prime fields.

Nothing here calls into qleak's linear algebra: subspaces are sets of
vectors, codes are sets of matrices, and every quantity is obtained by
enumeration.  The tests use these to derive expected values independently
of the code under test.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import product


def add(u, v, p):
    return tuple((a + b) % p for a, b in zip(u, v))


def scale(c, v, p):
    return tuple((c * a) % p for a in v)


def dot(u, v, p):
    return sum(a * b for a, b in zip(u, v)) % p


def vectors(n, p):
    return list(product(range(p), repeat=n))


def span(rows, n, p):
    """All F_p-combinations of ``rows``, as a frozenset of tuples."""
    out = {(0,) * n}
    for r in rows:
        out = {add(v, scale(c, r, p), p) for v in out for c in range(p)}
    return frozenset(out)


def all_subspaces(n, p):
    """Every subspace of F_p^n, by closing spans under adding one vector."""
    seen = {span([], n, p)}
    frontier = list(seen)
    vs = vectors(n, p)
    while frontier:
        nxt = []
        for S in frontier:
            for v in vs:
                if v in S:
                    continue
                T = frozenset(add(s, scale(c, v, p), p) for s in S for c in range(p))
                if T not in seen:
                    seen.add(T)
                    nxt.append(T)
        frontier = nxt
    return seen


def dim(S, p):
    return round(math.log(len(S), p))


def perp(S, n, p):
    return frozenset(u for u in vectors(n, p) if all(dot(u, v, p) == 0 for v in S))


def codewords(gens, n, m, p):
    """All F_p-combinations of the n x m generator matrices."""
    words = set()
    for cs in product(range(p), repeat=len(gens)):
        words.add(tuple(tuple(sum(c * G[i][j] for c, G in zip(cs, gens)) % p for j in range(m)) for i in range(n)))
    return words


def columns(X):
    return [tuple(r[j] for r in X) for j in range(len(X[0]))]


def shortened(words, W):
    """Codewords whose column space lies in the vector set W."""
    return {X for X in words if all(c in W for c in columns(X))}


def rank_times_m(words, V, n, m, p):
    """m * rho(V) = dim C - dim C(V^perp)."""
    k = dim(words, p)
    return k - dim(shortened(words, perp(V, n, p)), p)


def entropy_bits(counter):
    N = sum(counter.values())
    return -sum(c / N * math.log2(c / N) for c in counter.values())


def cond_entropy_bits(C1, C2, B, p):
    """H(coset of C2 | B X) for X uniform on C1, both codes as sets of matrices."""
    C2 = list(C2)

    def coset(X):
        return min(tuple(tuple((a - b) % p for a, b in zip(r, s)) for r, s in zip(X, Y)) for Y in C2)

    def observe(X):
        return tuple(tuple(sum(b * X[i][j] for i, b in enumerate(row)) % p for j in range(len(X[0]))) for row in B)

    joint, seen = Counter(), Counter()
    for X in C1:
        o = observe(X)
        joint[(coset(X), o)] += 1
        seen[o] += 1
    return entropy_bits(joint) - entropy_bits(seen)
