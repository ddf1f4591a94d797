from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracle
from helpers import e, sp
from qleak.code import dual, random_code, shorten
from qleak.errors import InputError
from qleak.gf import GF
from qleak.polymatroid import (
    ccdual_mismatches,
    duality_mismatches,
    find_equivalence,
    free,
    from_code,
    from_function,
    is_equivalence,
    uniform,
    verify_axioms,
)
from qleak.subspace import inverse, lattice, orthocomplement


@st.composite
def codes(draw, nmax2=4, nmax3=3):
    q = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(1, nmax2 if q == 2 else nmax3))
    m = draw(st.integers(1, 2))
    k = draw(st.integers(0, min(n * m, 6)))
    return random_code(n, m, k, draw(st.integers(0, 2**32)), GF(q))


def profile(M):
    return sorted(Counter((V.dim, M.rank_num(V)) for V in M.subspaces()).items())


# rank profiles derived by brute-force enumeration (tests/oracle.py), frozen
EX421_PROFILE = [((0, 0), 1), ((1, 0), 1), ((1, 2), 14), ((2, 2), 11), ((2, 4), 24), ((3, 2), 1), ((3, 4), 14), ((4, 4), 1)]
EX424_PROFILE = [((0, 0), 1), ((1, 3), 15), ((2, 3), 3), ((2, 6), 32), ((3, 6), 15), ((4, 6), 1)]


def test_example_profiles(ex421, ex424):
    assert profile(from_code(ex421.matrix)) == EX421_PROFILE
    assert profile(from_code(ex424.matrix)) == EX424_PROFILE


@given(codes(nmax2=3, nmax3=2))
def test_rank_matches_oracle(C):
    p = C.field.p
    gens = [tuple(tuple(r) for r in X) for X in C.matrices()]
    words = oracle.codewords(gens, C.n, C.m, p)
    M = from_code(C)
    for V in M.subspaces():
        assert M.rank_num(V) == oracle.rank_times_m(words, frozenset(V.vectors()), C.n, C.m, p)
        assert M.rank(V) == Fraction(M.rank_num(V), C.m)


@given(codes())
def test_axioms_hold_for_codes(C):
    assert verify_axioms(from_code(C)).ok


@given(codes())
def test_duality_identity(C):
    assert duality_mismatches(C) == []
    assert from_code(C).dual() == from_code(dual(C))


@given(codes())
def test_shortened_dual_identity(C):
    assert ccdual_mismatches(C) == []


@given(codes(), st.data())
def test_restriction_and_contraction_are_q_polymatroids(C, data):
    M = from_code(C)
    Z = data.draw(st.sampled_from(lattice(C.field, C.n)))
    assert verify_axioms(M.restrict(Z)).ok
    assert verify_axioms(M.contract(Z)).ok
    # contraction by Z is the dual of restricting the dual to Z^perp (dimension check)
    assert M.contract(Z).n == C.n - Z.dim
    assert M.dual().dual() == M


def test_axiom_violations_are_reported():
    F = GF(2)
    bad_bound = from_function(F, 2, 1, lambda V: 2 * V.dim)
    rep = verify_axioms(bad_bound)
    assert not rep.ok and rep.violations[0][0] == "R1"
    bad_mono = from_function(F, 2, 1, lambda V: 1 if V.dim == 1 else 0)
    assert any(v[0] == "R2" for v in verify_axioms(bad_mono).violations)
    bad_sub = from_function(F, 2, 1, lambda V: 0 if V.dim < 2 else 1)
    assert {v[0] for v in verify_axioms(bad_sub).violations} == {"R3"}
    assert len(verify_axioms(bad_sub, limit=2).violations) == 2

def test_uniform_and_free():
    F = GF(2)
    U = uniform(4, 2, F)
    assert verify_axioms(U).ok
    assert all(U.rank(V) == min(V.dim, 2) for V in U.subspaces())
    assert free(3, F) == uniform(3, 3, F)
    with pytest.raises(InputError):
        uniform(2, 3, F)
    # the dual of U(n, k) is U(n, n - k)
    assert U.dual() == uniform(4, 2, F)
    assert uniform(4, 1, F).dual() == uniform(4, 3, F)


def test_example421_circuits_match_reference(ex421):
    F = GF(2)
    M = from_code(ex421.matrix)
    assert M.is_q_matroid()
    want = {
        sp(F, 4, e(4, 1), e(4, 2, 3)),
        sp(F, 4, e(4, 2, 4), e(4, 3, 4)),
        sp(F, 4, e(4, 1), e(4, 2, 4)),
        sp(F, 4, e(4, 1, 2, 4), e(4, 3, 4)),
        sp(F, 4, e(4, 1, 3, 4)),
    }
    assert set(M.circuits()) == want


def test_q_matroid_predicates_need_integral_table():
    C = random_code(2, 2, 1, 5)
    M = from_code(C)
    if not M.is_q_matroid():
        with pytest.raises(InputError):
            M.circuits()


@pytest.mark.parametrize("seed", range(4))
def test_equivalence_search_recovers_relabelling(seed):
    F = GF(2)
    rng = random.Random(seed)
    C = random_code(3, 2, rng.randint(1, 5), seed)
    M = from_code(C)
    while True:
        P = tuple(tuple(rng.randrange(2) for _ in range(3)) for _ in range(3))
        try:
            inverse(P, F)
            break
        except Exception:
            continue
    N = M.relabel(P)
    assert is_equivalence(M, N, P)
    Q = find_equivalence(M, N)
    assert Q is not None and is_equivalence(M, N, Q)


def test_equivalence_rejects_different_profiles():
    F = GF(2)
    assert find_equivalence(uniform(3, 1, F), uniform(3, 2, F)) is None


def test_rank_of_complement_and_shortening_agree(ex421):
    C = ex421.matrix
    M = from_code(C)
    for V in M.subspaces():
        assert M.rank_num(V) == C.dim - shorten(C, orthocomplement(V)).dim
