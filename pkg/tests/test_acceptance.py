"""Acceptance criteria, each run at its stated tolerance and time limit.

Every criterion records a PASS/FAIL line in ``RESULTS``; the lines are
printed at the end of the session (see conftest.py) and, with ``-s``,
also as each test finishes.
"""

from __future__ import annotations

import random
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from helpers import e, sp
from qleak import access, leakage, minimal
from qleak.code import MatrixCode, expand, random_code, shorten
from qleak.gf import GF
from qleak.io import load_code
from qleak.polymatroid import ccdual_mismatches, duality_mismatches, from_code, uniform, verify_axioms
from qleak.subspace import coordinates, embed, lattice, orthocomplement
from qleak.suites import default_port, random_matrix_code, random_vector_code

F2 = GF(2)
RESULTS: dict = {}


@contextmanager
def criterion(num, title, limit=None):
    """Time the body and record one PASS/FAIL line for it."""
    t0 = time.perf_counter()
    state = {"ok": False, "note": ""}
    try:
        yield state
    finally:
        dt = time.perf_counter() - t0
        ok = state["ok"] and (limit is None or dt < limit)
        budget = f" (limit {limit:g} s)" if limit else ""
        note = f" - {state['note']}" if state["note"] else ""
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'} {title} [{dt:.2f} s{budget}]{note}"
        RESULTS[num] = line
        print(line)
    if limit is not None:
        assert dt < limit, f"criterion {num} took {dt:.2f} s"


def _port_E(M):
    return access.Port(M, sp(F2, 4, e(4, 1)), sp(F2, 4, e(4, 2), e(4, 3), e(4, 4)))


# ---------------------------------------------------------------------------

def test_criterion_1_example421():
    with criterion(1, "example421: gamma_min and circuits", 1.0) as st:
        C = load_code("example421").matrix
        M = from_code(C)
        S = access.port(_port_E(M))
        gm = {S.to_world(V) for V in access.gamma_min(S)}
        want_gm = {sp(F2, 4, e(4, 2, 4)), sp(F2, 4, e(4, 2, 3)), sp(F2, 4, e(4, 3, 4))}
        want_circ = {
            sp(F2, 4, e(4, 1), e(4, 2, 3)),
            sp(F2, 4, e(4, 2, 4), e(4, 3, 4)),
            sp(F2, 4, e(4, 1), e(4, 2, 4)),
            sp(F2, 4, e(4, 1, 2, 4), e(4, 3, 4)),
            sp(F2, 4, e(4, 1, 3, 4)),
        }
        assert gm == want_gm
        assert set(M.circuits()) == want_circ
        st["ok"] = True


def test_criterion_2_example424():
    with criterion(2, "example424: gamma_min and Massey image", 5.0) as st:
        L = load_code("example424")
        M = from_code(L.matrix)
        spec = _port_E(M)
        S = access.port(spec)
        gm = {S.to_world(V) for V in access.gamma_min(S)}
        want_gm = {
            sp(F2, 4, e(4, 2, 3)),
            sp(F2, 4, e(4, 2), e(4, 4)),
            sp(F2, 4, e(4, 2), e(4, 3, 4)),
            sp(F2, 4, e(4, 2, 4), e(4, 3)),
            sp(F2, 4, e(4, 3), e(4, 4)),
        }
        img = {embed(U, spec.P.basis, 4) for U in minimal.massey_image(L.vector, spec.P0, spec.P)}
        want_img = {sp(F2, 4, e(4, 2, 3)), sp(F2, 4, e(4, 2), e(4, 4)), sp(F2, 4, e(4, 2), e(4, 3, 4))}
        assert gm == want_gm
        assert img == want_img and img < gm
        st["ok"] = True


def test_criterion_3_leakage_routes():
    with criterion(3, "three-route leakage agreement", 60.0) as st:
        C = load_code("example421").matrix
        P0 = sp(F2, 4, e(4, 1))
        pair = leakage.NestedPair(C, shorten(C, orthocomplement(P0)))
        rep = leakage.check_leakage_routes(pair, P0)
        assert rep.passed and rep.checked == 67
        checked = 1
        rng = random.Random("acceptance/3")
        # random nested pairs (port route not applicable)
        for i in range(25):
            n, m = rng.randint(1, 4), rng.randint(1, 2)
            k1 = rng.randint(1, min(6, n * m))
            pair = leakage.random_nested_pair(n, m, k1, rng.randint(0, k1 - 1), rng.randrange(2**32), F2)
            assert leakage.check_leakage_routes(pair).passed
            checked += 1
        # pairs of the form C1(P0^perp) < C1, where the port route applies too
        ports = 0
        while ports < 10:
            n, m = rng.randint(2, 4), rng.randint(1, 2)
            C1 = random_code(n, m, rng.randint(1, min(6, n * m)), rng.randrange(2**32), F2)
            spec = default_port(from_code(C1), rng)
            if spec is None:
                continue
            pair = leakage.NestedPair.from_port(C1, spec.P0)
            assert leakage.check_leakage_routes(pair, spec.P0).passed
            ports += 1
            checked += 1
        st["ok"] = True
        st["note"] = f"{checked} pairs, every observation row space"


# instances shared by criteria 4 and 5
def _suite4_codes():
    rng = random.Random("acceptance/4")
    codes = [random_matrix_code(rng) for _ in range(60)]
    assert {C.field.q for C in codes} == {2, 3}
    return codes


def test_criteria_4_and_5_axioms_duality_lemma():
    codes = _suite4_codes()
    with criterion(4, "axioms R1-R3 and polymatroid duality", 120.0) as st:
        for C in codes:
            assert verify_axioms(from_code(C)).ok
            assert duality_mismatches(C) == []
        st["ok"] = True
        st["note"] = f"{len(codes)} codes, q in (2, 3)"
    with criterion(5, "shortened-dual dimension identity", None) as st:
        for C in codes:
            assert ccdual_mismatches(C) == []
        st["ok"] = True
        st["note"] = f"every V on the {len(codes)} codes"


MC_CASES = [
    (2, 4, 2, 6, 2, 0, [(0, 0, 0, 1)]),
    (2, 3, 2, 5, 1, 0, [(0, 0, 1)]),
    (3, 3, 2, 4, 1, 0, [(0, 0, 1)]),
    (2, 4, 2, 5, 2, 0, [(0, 0, 1, 0)]),
    (2, 4, 1, 4, 1, 0, [(0, 0, 1, 1)]),
]


def test_criterion_6_entropy():
    with criterion(6, "quotient entropy identities and Monte-Carlo", 60.0) as st:
        rng = random.Random("acceptance/6")
        for _ in range(12):
            C = random_matrix_code(rng)
            L = lattice(C.field, C.n)
            Vs = [rng.choice(L) for _ in range(rng.randint(2, 3))]
            rep = leakage.entropy_Z(C, Vs)
            assert rep.ok, rep.failures
        worst = 0.0
        for q, n, m, k1, k2, seed, rows in MC_CASES:
            pair = leakage.random_nested_pair(n, m, k1, k2, seed, GF(q))
            obs = leakage.Observation(GF(q), rows)
            exact = leakage.cond_entropy_direct(pair, obs)
            est = leakage.monte_carlo_entropy(pair, obs, 10**5, seed=11)
            worst = max(worst, abs(est.bits - exact.bits))
        assert worst < 0.05
        st["ok"] = True
        st["note"] = f"12 instances; worst Monte-Carlo error {worst:.4f} bits"


def _structural_instances():
    rng = random.Random("acceptance/7")
    out = []
    for _ in range(30):
        C = random_matrix_code(rng)
        spec = default_port(from_code(C), rng)
        if spec is not None:
            out.append(spec)
    for name in ("example421", "example424"):
        out.append(_port_E(from_code(load_code(name).matrix)))
    return out


def _port_minor_failures(specs, contract_when):
    bad = []
    for spec in specs:
        S = access.port(spec)
        for Z in lattice(spec.M.field, spec.M.n):
            if not Z <= spec.P:
                continue
            zc = coordinates(Z, spec.P.basis)
            r = access.check_port_minor_identities(spec, Z, contraction=contract_when(S, zc))
            if not r.passed:
                bad.append((spec, Z))
    return bad


def test_criterion_7_supported_clauses():
    """Every structural clause that holds, with contraction under Z in A."""
    specs = _structural_instances()
    for spec in specs:
        S = access.port(spec)
        if spec.P.dim <= 3:
            for Z in lattice(S.field, S.dim):
                assert access.check_minor_duality(S, Z).passed
        M = spec.M
        if S.gamma and S.privacy and M.rank_num(spec.P0) == M.denom * spec.P0.dim:
            assert access.check_dual_port(spec).passed
        if S.gamma and S.privacy and access.min_gap(S) is not None:
            assert access.check_gap_bound(spec).passed
    assert _port_minor_failures(specs, lambda S, zc: zc in S.privacy) == []
    rng = random.Random("acceptance/7q")
    for _ in range(15):
        V = random_vector_code(rng)
        M = from_code(expand(V))
        spec = default_port(M, rng)
        if spec is not None:
            assert access.check_qmatroid_port_characterization(spec).passed
    r = access.check_qmatroid_port_characterization(_port_E(from_code(load_code("example421").matrix)))
    assert r.passed and r.details["gamma_min_not_from_circuits"] == [sp(F2, 4, e(4, 3, 4))]
    for n in (2, 3, 4, 5):
        for k in (1, 2, 3):
            if k <= n:
                assert access.check_uniform_threshold(n, k, F2).passed


@pytest.mark.xfail(
    strict=True,
    reason="the contraction identity for ports fails when Z leaks partially (Z neither in Gamma nor in A)",
)
def test_criterion_7_as_stated():
    with criterion(7, "structural theorem suites", None) as st:
        specs = _structural_instances()
        test_criterion_7_supported_clauses()
        # contraction asserted for every Z outside Gamma, as the criterion states it
        bad = _port_minor_failures(specs, lambda S, zc: zc not in S.gamma)
        st["note"] = (
            f"port-minor contraction fails on {len(bad)} (port, Z) pairs with partial leakage; "
            "all other clauses pass"
        )
        assert bad == []
        st["ok"] = True
        st["note"] = ""


BD_WITNESS = [((1, 1), (0, 0), (1, 1)), ((0, 0), (1, 0), (1, 0)), ((0, 0), (0, 1), (0, 0))]


def test_criterion_8_brickell_davenport():
    with criterion(8, "Brickell-Davenport property", None) as st:
        rng = random.Random("acceptance/8")
        specs = _structural_instances()
        for _ in range(20):
            V = random_vector_code(rng)
            spec = default_port(from_code(expand(V)), rng)
            if spec is not None:
                specs.append(spec)
        specs.append(_port_E(uniform(4, 2, F2)))
        met = 0
        for spec in specs:
            r = access.check_brickell_davenport(spec)
            assert r.passed
            if r.details["hypotheses_met"]:
                met += 1
                assert spec.M.restrict(spec.P).is_q_matroid()
        assert met > 0
        C = MatrixCode.from_matrices(F2, 3, 2, BD_WITNESS)
        W = access.Port(from_code(C), sp(F2, 3, e(3, 1)), sp(F2, 3, e(3, 2), e(3, 3)))
        r = access.check_brickell_davenport(W)
        assert not r.details["hypotheses_met"] and not W.M.restrict(W.P).is_q_matroid()
        st["ok"] = True
        st["note"] = f"{len(specs)} ports, {met} meet the hypotheses; fractional witness pinned"


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "qleak", *argv], capture_output=True, check=False)


def test_criterion_9_determinism():
    with criterion(9, "byte-identical CLI output for fixed seeds", None) as st:
        runs = [
            ("verify", "--suite", "entropy-thm", "--seed", "5", "--count", "3"),
            ("verify", "--suite", "axioms", "--seed", "5", "--count", "5", "--jobs", "2"),
            ("entropy", "--code", "example421", "--p0", "e1", "--obs", "e2", "--samples", "10000", "--seed", "4"),
            ("leakage", "--code", "example424", "--p0", "e1", "--sweep", "--format", "csv"),
        ]
        for argv in runs:
            a, b = _cli(*argv), _cli(*argv)
            assert a.returncode == 0, a.stderr
            assert a.stdout == b.stdout and a.stdout
        st["ok"] = True
