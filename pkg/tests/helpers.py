"""Small constructors shared by the tests."""

from __future__ import annotations

from qleak.subspace import span


def sp(F, n, *rows):
    """Subspace spanned by the given rows (test shorthand)."""
    return span([tuple(r) for r in rows], n, F)


def e(n, *idx):
    """Sum of the 1-based unit vectors e_i in F^n."""
    v = [0] * n
    for i in idx:
        v[i - 1] = 1
    return tuple(v)
