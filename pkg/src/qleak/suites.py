"""Seeded theorem-check suites behind ``qleak verify``.

Each suite maps to one check operation.  Instances are drawn from a
``random.Random`` keyed by (suite, seed, index), so runs are reproducible
and independent of how the work is split across processes.  A failing
instance yields a counterexample dict that embeds the code in the same
JSON format ``--code`` reads, so it can be replayed directly.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor

from . import access, leakage, minimal
from .code import MatrixCode, VectorCode, expand, random_code
from .errors import InputError
from .gf import GF, ExtBasis
from .io import code_from_json, code_to_json, to_jsonable
from .polymatroid import ccdual_mismatches, duality_mismatches, from_code, verify_axioms
from .subspace import lattice, one_dim_subspaces, quotient

SUITES = (
    "axioms",
    "duality",
    "ccdual-lemma",
    "entropy-thm",
    "leakage-thm",
    "port-monotone",
    "minor-duality",
    "port-minors",
    "dual-port",
    "qmatroid-port",
    "massey",
    "gap-bound",
    "uniform-threshold",
    "brickell-davenport",
)

DEFAULT_COUNTS = {
    "axioms": 50,
    "duality": 50,
    "ccdual-lemma": 50,
    "entropy-thm": 10,
    "leakage-thm": 25,
    "port-monotone": 20,
    "minor-duality": 10,
    "port-minors": 10,
    "dual-port": 20,
    "qmatroid-port": 10,
    "massey": 10,
    "gap-bound": 20,
    "uniform-threshold": 12,
    "brickell-davenport": 20,
}


# --------------------------------------------------------------------------
# instance generators
# --------------------------------------------------------------------------

def random_matrix_code(rng: random.Random, qs=(2, 3)) -> MatrixCode:
    """A desk-scale code: q=2 with n <= 4, m <= 2, or q=3 with n <= 3, m <= 2."""
    q = rng.choice(qs)
    F = GF(q)
    n = rng.randint(2, 4 if q == 2 else 3)
    m = rng.randint(1, 2)
    k = rng.randint(1, n * m)
    return random_code(n, m, k, rng.randrange(2**32), F)


def random_vector_code(rng: random.Random, configs=((2, 2), (2, 3), (3, 3), (3, 2), (4, 3), (4, 4))) -> VectorCode:
    """An F_{2^m}-linear code; configs are (n, m) pairs with n <= 4."""
    n, m = rng.choice(configs)
    big = GF(2, m)
    ext = ExtBasis(big, GF(2))
    k = rng.randint(1, n - 1)
    while True:
        G = [tuple(rng.randrange(big.q) for _ in range(n)) for _ in range(k)]
        try:
            return VectorCode(ext, G)
        except InputError:
            continue


def default_port(M, rng: random.Random | None = None):
    """A port (M, P0, P) with a line P0 of positive rank and its coordinate complement."""
    lines = list(one_dim_subspaces(M.ground))
    if rng is not None:
        rng.shuffle(lines)
    else:
        # coordinate lines e_1, e_2, ... first
        lines.sort(key=lambda V: (sum(1 for x in V.basis[0] if x), V.pivots))
    for P0 in lines:
        if M.rank_num(P0) > 0:
            P = quotient(P0).section()
            return access.Port(M, P0, P)
    return None


# --------------------------------------------------------------------------
# suite bodies: each returns (passed, counterexample-or-None, skipped)
# --------------------------------------------------------------------------

def _cex(C, **extra):
    out = code_to_json(C)
    out.update(to_jsonable(extra))
    return out


def _code_for(rng, code, kind="matrix"):
    if code is not None:
        return code
    if kind == "vector":
        return random_vector_code(rng)
    return random_matrix_code(rng)


def _as_matrix(C):
    return expand(C) if isinstance(C, VectorCode) else C


def run_axioms(rng, code):
    C = _as_matrix(_code_for(rng, code))
    rep = verify_axioms(from_code(C))
    return rep.ok, None if rep.ok else _cex(C, violations=rep.violations[:5])


def run_duality(rng, code):
    C = _as_matrix(_code_for(rng, code))
    bad = duality_mismatches(C)
    return not bad, None if not bad else _cex(C, subspaces=bad[:5])


def run_ccdual(rng, code):
    C = _as_matrix(_code_for(rng, code))
    bad = ccdual_mismatches(C)
    return not bad, None if not bad else _cex(C, subspaces=bad[:5])


def run_entropy(rng, code):
    C = _as_matrix(_code_for(rng, code))
    L = lattice(C.field, C.n)
    Vs = [rng.choice(L) for _ in range(rng.randint(1, 3))]
    rep = leakage.entropy_Z(C, Vs)
    return rep.ok, None if rep.ok else _cex(C, V_list=Vs, failures=rep.failures)


def run_leakage(rng, code):
    if code is None:
        F = GF(2)
        n, m = rng.randint(1, 4), rng.randint(1, 2)
        k1 = rng.randint(1, min(6, n * m))
        pair = leakage.random_nested_pair(n, m, k1, rng.randint(0, k1 - 1), rng.randrange(2**32), F)
        P0 = None
    else:
        C = _as_matrix(code)
        M = from_code(C)
        spec = default_port(M)
        if spec is None:
            return None, None
        pair = leakage.NestedPair.from_port(C, spec.P0)
        P0 = spec.P0
    rep = leakage.check_leakage_routes(pair, P0)
    if rep.passed:
        return True, None
    return False, _cex(pair.C1, C2=code_to_json(pair.C2), mismatches=rep.mismatches[:5])


def _port_instance(rng, code, kind="matrix"):
    C = _as_matrix(_code_for(rng, code, kind))
    M = from_code(C)
    spec = default_port(M, rng if code is None else None)
    return C, M, spec


def run_port_monotone(rng, code):
    C, M, spec = _port_instance(rng, code)
    if spec is None:
        return None, None
    r = access.check_port_monotone(spec)
    return r.passed, None if r.passed else _cex(C, P0=spec.P0, P=spec.P, detail=r.counterexample)


def run_minor_duality(rng, code):
    C, M, spec = _port_instance(rng, code)
    if spec is None or spec.P.dim > 3:
        return None, None
    S = access.port(spec)
    for Z in lattice(S.field, S.dim):
        r = access.check_minor_duality(S, Z)
        if not r.passed:
            return False, _cex(C, P0=spec.P0, P=spec.P, Z_local=Z, detail=r.counterexample)
    return True, None


def run_port_minors(rng, code):
    C, M, spec = _port_instance(rng, code)
    if spec is None:
        return None, None
    S = access.port(spec)
    from .subspace import coordinates

    for Z in lattice(M.field, M.n):
        if not Z <= spec.P:
            continue
        contract = coordinates(Z, spec.P.basis) not in S.gamma
        r = access.check_port_minor_identities(spec, Z, contraction=contract)
        if not r.passed:
            return False, _cex(C, P0=spec.P0, P=spec.P, Z=Z, detail=r.counterexample)
    return True, None


def run_dual_port(rng, code):
    C, M, spec = _port_instance(rng, code)
    if spec is None:
        return None, None
    S = access.port(spec)
    if access.is_degenerate(S) or M.rank_num(spec.P0) != M.denom * spec.P0.dim:
        return None, None
    r = access.check_dual_port(spec)
    return r.passed, None if r.passed else _cex(C, P0=spec.P0, P=spec.P, detail=r.counterexample)


def run_qmatroid_port(rng, code):
    C, M, spec = _port_instance(rng, code, "vector")
    if spec is None or not M.is_q_matroid():
        return None, None
    r = access.check_qmatroid_port_characterization(spec)
    return r.passed, None if r.passed else _cex(C, P0=spec.P0, P=spec.P, detail=r.counterexample)


def run_massey(rng, code):
    V = code if isinstance(code, VectorCode) else None
    if code is not None and V is None:
        return None, None
    V = V or random_vector_code(rng)
    spec = default_port(from_code(expand(V)))
    if spec is None:
        return None, None
    P0, P = spec.P0, spec.P
    r = minimal.check_massey(V, P0, P)
    return r.passed, None if r.passed else _cex(V, P0=P0, P=P, detail=r.details, missing=r.counterexample)


def run_gap(rng, code):
    C, M, spec = _port_instance(rng, code)
    if spec is None:
        return None, None
    S = access.port(spec)
    if access.is_degenerate(S) or access.min_gap(S) is None:
        return None, None
    r = access.check_gap_bound(spec)
    return r.passed, None if r.passed else _cex(C, P0=spec.P0, P=spec.P, detail=r.details)


_UNIFORM_CASES = [(n, k) for n in (2, 3, 4, 5) for k in (1, 2, 3) if k <= n]


def run_uniform(rng, code, index=0):
    n, k = _UNIFORM_CASES[index % len(_UNIFORM_CASES)]
    r = access.check_uniform_threshold(n, k, GF(2))
    return r.passed, None if r.passed else {"n": n, "k": k, "detail": to_jsonable(r.details)}


def run_brickell(rng, code):
    kind = "vector" if code is None and rng.random() < 0.5 else "matrix"
    C, M, spec = _port_instance(rng, code, kind)
    if spec is None:
        return None, None
    r = access.check_brickell_davenport(spec)
    return r.passed, None if r.passed else _cex(C, P0=spec.P0, P=spec.P, detail=r.details)


RUNNERS = {
    "axioms": run_axioms,
    "duality": run_duality,
    "ccdual-lemma": run_ccdual,
    "entropy-thm": run_entropy,
    "leakage-thm": run_leakage,
    "port-monotone": run_port_monotone,
    "minor-duality": run_minor_duality,
    "port-minors": run_port_minors,
    "dual-port": run_dual_port,
    "qmatroid-port": run_qmatroid_port,
    "massey": run_massey,
    "gap-bound": run_gap,
    "uniform-threshold": run_uniform,
    "brickell-davenport": run_brickell,
}


def run_instance(args):
    suite, seed, index, code_json = args
    rng = random.Random(f"{suite}/{seed}/{index}")
    code = None
    if code_json is not None:
        loaded = code_from_json(code_json)
        code = loaded.vector if loaded.vector is not None else loaded.matrix
    fn = RUNNERS[suite]
    if suite == "uniform-threshold":
        passed, cex = fn(rng, code, index)
    else:
        passed, cex = fn(rng, code)
    if cex is not None:
        cex = dict(cex)
        cex["suite"] = suite
        cex["seed"] = seed
        cex["index"] = index
    return {"index": index, "passed": passed, "counterexample": cex}


def run_suite(suite: str, seed: int = 0, count: int | None = None, code_json=None, jobs: int = 1) -> dict:
    """Run ``count`` instances of ``suite``; with ``code_json`` the fixed code is checked once."""
    if suite not in RUNNERS:
        raise InputError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if code_json is not None:
        count = 1
    elif count is None:
        count = DEFAULT_COUNTS[suite]
    if count < 1:
        raise InputError("count must be positive")
    tasks = [(suite, seed, i, code_json) for i in range(count)]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_instance, tasks))
    else:
        results = [run_instance(t) for t in tasks]
    checked = [r for r in results if r["passed"] is not None]
    failures = [r for r in checked if not r["passed"]]
    return {
        "suite": suite,
        "seed": seed,
        "count": count,
        "checked": len(checked),
        "skipped": count - len(checked),
        "passed": not failures,
        "failures": [r["counterexample"] for r in failures],
    }
