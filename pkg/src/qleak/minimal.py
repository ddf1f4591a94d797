"""Minimal codewords of vector rank-metric codes and the Massey-type image."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

from . import config
from .access import CheckReport, Port, gamma_min, port
from .code import VectorCode, colsp, expand
from .errors import BudgetExceeded, InputError
from .polymatroid import from_code
from .subspace import Subspace, coordinates, embed, rank, vecmat


def support(C: VectorCode, v) -> Subspace:
    """colsp(Pi(v)) in F_q^n."""
    return colsp(C.ext.expand_vector(tuple(v)), C.ext.base)


def projective_rep(C: VectorCode, v) -> tuple:
    """Lexicographically smallest alpha * v over nonzero alpha."""
    big = C.ext.big
    return min(tuple(big.mul(a, x) for x in v) for a in range(1, big.q))


def _proportional(C: VectorCode, u, v) -> bool:
    return rank([tuple(u), tuple(v)], C.ext.big, C.n) <= 1


def _class_words(C: VectorCode, budget: int | None = None):
    """One codeword per projective class (coefficients with leading entry 1)."""
    big = C.ext.big
    Q, k = big.q, C.k
    classes = (Q**k - 1) // (Q - 1) if k else 0
    limit = config.codeword_budget(budget)
    if classes > limit:
        raise BudgetExceeded(f"{classes} projective classes exceed the budget of {limit}")
    for lead in range(k):
        for tail in product(range(Q), repeat=k - lead - 1):
            coeffs = (0,) * lead + (1,) + tail
            yield vecmat(coeffs, C.generator, big, C.n)


def is_minimal_codeword(C: VectorCode, v, budget: int | None = None) -> bool:
    v = tuple(int(x) for x in v)
    if len(v) != C.n or not any(v):
        raise InputError("need a nonzero word of the code's length")
    if not C.contains(v):
        raise InputError("word is not a codeword")
    S = support(C, v)
    for w in _class_words(C, budget):
        if support(C, w) <= S and not _proportional(C, v, w):
            return False
    return True


@dataclass
class MinimalityReport:
    code: VectorCode
    minimal: list
    classes: int
    is_minimal_code: bool
    supports: dict = dc_field(default_factory=dict, repr=False)


def minimal_codewords(C: VectorCode, budget: int | None = None) -> MinimalityReport:
    words = list(_class_words(C, budget))
    sup = [support(C, w) for w in words]
    minimal = []
    for i, w in enumerate(words):
        if not any(j != i and sup[j] <= sup[i] for j in range(len(words))):
            minimal.append(i)
    reps = {projective_rep(C, words[i]): sup[i] for i in minimal}
    ordered = sorted(reps)
    return MinimalityReport(
        code=C,
        minimal=ordered,
        classes=len(words),
        is_minimal_code=len(minimal) == len(words),
        supports={r: reps[r] for r in ordered},
    )


def _check_port_spaces(C: VectorCode, P0: Subspace, P: Subspace):
    n = C.n
    if P0.n != n or P.n != n:
        raise InputError("P0 and P must live in F_q^n")
    if P0.dim != 1:
        raise InputError("need dim P0 = 1")
    if (P0 & P).dim or P0.dim + P.dim != n:
        raise InputError("P0 and P must be complementary")


def massey_image(C: VectorCode, P0: Subspace, P: Subspace, budget: int | None = None) -> set:
    """{colsp(Pi(X)) cap P : X minimal in the dual, P0 <= colsp(Pi(X))} in P's coordinates."""
    _check_port_spaces(C, P0, P)
    rep = minimal_codewords(C.dual(), budget)
    out = set()
    for S in rep.supports.values():
        if P0 <= S:
            out.add(coordinates(S & P, P.basis))
    return out


def check_massey(C: VectorCode, P0: Subspace, P: Subspace, budget: int | None = None) -> CheckReport:
    """Image inside Gamma_min always; equal to it when the dual code is minimal."""
    _check_port_spaces(C, P0, P)
    M = from_code(expand(C), budget)
    if not M.is_q_matroid():
        raise InputError("expanded code does not give a q-matroid")
    S = port(Port(M, P0, P))
    gm = set(gamma_min(S))
    dual_rep = minimal_codewords(C.dual(), budget)
    image = massey_image(C, P0, P, budget)
    n = C.n
    details = {
        "gamma_min": sorted((embed(V, P.basis, n) for V in gm), key=Subspace.sort_key),
        "image": sorted((embed(V, P.basis, n) for V in image), key=Subspace.sort_key),
        "dual_is_minimal": dual_rep.is_minimal_code,
        "sufficiency": image <= gm,
    }
    passed = details["sufficiency"]
    if dual_rep.is_minimal_code:
        details["necessity"] = image == gm
        passed = passed and details["necessity"]
    cex = None
    if not passed:
        world = lambda spaces: sorted((embed(V, P.basis, n) for V in spaces), key=Subspace.sort_key)  # noqa: E731
        cex = {"extra": world(image - gm), "missing": world(gm - image)}
    return CheckReport("massey", passed, details, cex)
