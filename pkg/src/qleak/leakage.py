"""Nested coset coding schemes and their information leakage.

Entropies are exact: an :class:`Entropy` stores a rational multiple of
log q, so equality between the different computation routes never goes
through floating point.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .code import MatrixCode, dual, flatten, shorten, unflatten
from .errors import InputError
from .gf import FieldCtx
from .polymatroid import code_rank_num
from .subspace import (
    Subspace,
    lattice,
    matmul,
    orthocomplement,
    pivots_of,
    rank,
    reduce_vector,
    row_reduce,
    span,
    sum_dot,
    vecmat,
    zero_space,
)


# --------------------------------------------------------------------------
# exact entropies
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Entropy:
    """``logq * log2(q)`` bits."""

    logq: Fraction
    q: int

    def __post_init__(self):
        object.__setattr__(self, "logq", Fraction(self.logq))

    @property
    def bits(self) -> float:
        return float(self.logq) * math.log2(self.q)

    def exact_bits(self):
        """Exact bit value when log2(q) is rational (q a power of two), else ``None``."""
        e = _log_int(self.q, 2)
        return None if e is None else self.logq * e

    def __add__(self, other: "Entropy") -> "Entropy":
        _same_q(self, other)
        return Entropy(self.logq + other.logq, self.q)

    def __sub__(self, other: "Entropy") -> "Entropy":
        _same_q(self, other)
        return Entropy(self.logq - other.logq, self.q)

    def to_json(self) -> dict:
        b = self.exact_bits()
        if b is not None:
            return {"num": b.numerator, "den": b.denominator, "unit": "bits"}
        return {"num": self.logq.numerator, "den": self.logq.denominator, "unit": "logq", "q": self.q}


def _same_q(a, b):
    if a.q != b.q:
        raise InputError("entropies over different field sizes")


def _log_int(x: int, base: int):
    """k with base**k == x, or ``None``."""
    k = 0
    while x > 1 and x % base == 0:
        x //= base
        k += 1
    return k if x == 1 else None


def entropy_from_counts(counts, q: int) -> Entropy:
    """Exact Shannon entropy of an empirical law whose cell ratios are powers of p."""
    counts = [c for c in counts if c]
    N = sum(counts)
    p = _smallest_prime_factor(q)
    e = _log_int(q, p)
    total = Fraction(0)
    for c in counts:
        if N % c:
            raise InputError("cell probability is not a power of 1/p; entropy is not rational in log q")
        k = _log_int(N // c, p)
        if k is None:
            raise InputError("cell probability is not a power of 1/p; entropy is not rational in log q")
        total += Fraction(c, N) * Fraction(k, e)
    return Entropy(total, q)


def _smallest_prime_factor(q):
    d = 2
    while q % d:
        d += 1
    return d


# --------------------------------------------------------------------------
# schemes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Observation:
    """A wiretapper observing B C for a mu x n matrix B."""

    field: FieldCtx
    B: tuple

    def __post_init__(self):
        B = tuple(tuple(int(x) for x in r) for r in self.B)
        if not B or any(len(r) != len(B[0]) for r in B):
            raise InputError("observation matrix must be a non-empty rectangle")
        object.__setattr__(self, "B", B)

    @classmethod
    def from_subspace(cls, V: Subspace) -> "Observation":
        rows = V.basis or ((0,) * V.n,)
        return cls(V.field, rows)

    @property
    def n(self) -> int:
        return len(self.B[0])

    @property
    def mu(self) -> int:
        return len(self.B)

    @property
    def rowsp(self) -> Subspace:
        return span(self.B, self.n, self.field)

    def apply(self, X):
        return matmul(self.B, X, self.field)


@dataclass(frozen=True)
class NestedPair:
    """C2 < C1 with a complement W spanned by completed basis rows of C1."""

    C1: MatrixCode
    C2: MatrixCode
    complement: tuple = dc_field(init=False, repr=False)

    def __post_init__(self):
        C1, C2 = self.C1, self.C2
        if (C1.field, C1.n, C1.m) != (C2.field, C2.n, C2.m):
            raise InputError("nested codes live in different matrix spaces")
        if not C2 < C1:
            raise InputError("need C2 strictly contained in C1")
        F, N = C1.field, C1.n * C1.m
        rows = list(C2.basis)
        comp = []
        for b in C1.basis:
            if rank(rows + [b], F, N) > len(rows):
                rows.append(b)
                comp.append(b)
        object.__setattr__(self, "complement", tuple(comp))

    @classmethod
    def from_port(cls, C1: MatrixCode, P0: Subspace) -> "NestedPair":
        return cls(C1, shorten(C1, orthocomplement(P0)))

    @property
    def field(self):
        return self.C1.field

    @property
    def n(self):
        return self.C1.n

    @property
    def m(self):
        return self.C1.m

    @property
    def ell(self) -> int:
        return self.C1.dim - self.C2.dim

    def psi(self, x):
        """The complement element indexed by the message x in F_q^ell."""
        if len(x) != self.ell:
            raise InputError(f"message must have length {self.ell}")
        return vecmat(x, self.complement, self.field, self.n * self.m)

    def encode(self, x, y):
        """psi(x) + sum_j y_j C2_j, flattened."""
        return vecmat(tuple(x) + tuple(y), self.complement + self.C2.basis, self.field, self.n * self.m)

    def dual_basis(self):
        return dual(self.C2).basis


def psi_pad(pair: NestedPair, X) -> tuple:
    """Psi(X): k2perp constant rows tr(H_i X^t) stacked on top of X."""
    n, m, F = pair.n, pair.m, pair.field
    v = flatten(X) if X and isinstance(X[0], (tuple, list)) else tuple(X)
    if len(v) != n * m or not pair.C1.contains(v):
        raise InputError("X is not a codeword of C1")
    top = tuple((sum_dot(h, v, F),) * m for h in pair.dual_basis())
    return top + unflatten(v, n, m)


def padded_code(pair: NestedPair) -> MatrixCode:
    k = len(pair.dual_basis())
    rows = [flatten(psi_pad(pair, b)) for b in pair.C1.basis]
    return MatrixCode(pair.field, k + pair.n, pair.m, row_reduce(rows, pair.field, (k + pair.n) * pair.m))


def leakage_martinez(pair: NestedPair, obs: Observation) -> int:
    """I(x; BC) in log q units: dim C2perp(rowsp B) - dim C1perp(rowsp B)."""
    V = obs.rowsp
    return shorten(dual(pair.C2), V).dim - shorten(dual(pair.C1), V).dim


def _shift(V: Subspace, k: int) -> Subspace:
    rows = [(0,) * k + tuple(v) for v in V.basis]
    return Subspace(V.field, k + V.n, tuple(rows))


def cond_entropy_padded(pair: NestedPair, obs: Observation) -> Entropy:
    """m rho_D(Q0 | tau(rowsp B)) for the padded code D."""
    D = padded_code(pair)
    k = D.n - pair.n
    F = pair.field
    Q0 = Subspace(F, D.n, tuple(tuple(1 if j == i else 0 for j in range(D.n)) for i in range(k)))
    tV = _shift(obs.rowsp, k)
    return Entropy(code_rank_num(D, Q0 + tV) - code_rank_num(D, tV), F.q)


def cond_entropy_port(C1: MatrixCode, P0: Subspace, obs: Observation, C2: MatrixCode | None = None) -> Entropy:
    """m rho_{C1}(P0 | rowsp B), valid when C2 = C1(P0^perp)."""
    if C2 is not None and C2 != shorten(C1, orthocomplement(P0)):
        raise InputError("C2 is not the shortening of C1 at P0^perp")
    V = obs.rowsp
    return Entropy(code_rank_num(C1, P0 + V) - code_rank_num(C1, V), C1.field.q)


def cond_entropy_martinez(pair: NestedPair, obs: Observation) -> Entropy:
    return Entropy(pair.ell - leakage_martinez(pair, obs), pair.field.q)


def cond_entropy_direct(pair: NestedPair, obs: Observation, budget: int | None = None) -> Entropy:
    """H(x | BC) from the exact joint law of (x, BC) by enumeration."""
    from itertools import product

    from . import config
    from .errors import BudgetExceeded

    F = pair.field
    total = F.q ** pair.C1.dim
    limit = config.codeword_budget(budget)
    if total > limit:
        raise BudgetExceeded(f"{total} codewords exceed the budget of {limit}")
    joint, marg = Counter(), Counter()
    for x in product(range(F.q), repeat=pair.ell):
        for y in product(range(F.q), repeat=pair.C2.dim):
            X = unflatten(pair.encode(x, y), pair.n, pair.m)
            seen = obs.apply(X)
            joint[(x, seen)] += 1
            marg[seen] += 1
    return entropy_from_counts(joint.values(), F.q) - entropy_from_counts(marg.values(), F.q)


# --------------------------------------------------------------------------
# entropy of quotient variables
# --------------------------------------------------------------------------

@dataclass
class EntropyReport:
    marginals: list
    joint: Entropy
    joint_of_sum: Entropy
    conditionals: dict
    ok: bool
    failures: list = dc_field(default_factory=list)


def _coset_key(v, K: MatrixCode):
    piv = pivots_of(K.basis)
    return tuple(reduce_vector(v, K.basis, piv, K.field))


def entropy_Z(C: MatrixCode, V_list, budget: int | None = None) -> EntropyReport:
    """Exact entropies of Z_V = X mod C(V^perp) for X uniform on C."""
    V_list = list(V_list)
    F = C.field
    kernels = [shorten(C, orthocomplement(V)) for V in V_list]
    words = list(C.codewords(budget))
    keys = [[_coset_key(w, K) for K in kernels] for w in words]
    marg = [entropy_from_counts(Counter(k[i] for k in keys).values(), F.q) for i in range(len(V_list))]
    joint = entropy_from_counts(Counter(tuple(k) for k in keys).values(), F.q)
    total = V_list[0] if V_list else zero_space(F, C.n)
    for V in V_list[1:]:
        total = total + V
    Ks = shorten(C, orthocomplement(total))
    joint_sum = entropy_from_counts(Counter(_coset_key(w, Ks) for w in words).values(), F.q)
    failures = []
    for V, h in zip(V_list, marg):
        if h.logq != code_rank_num(C, V):
            failures.append(("marginal", V))
    if joint != joint_sum:
        failures.append(("joint", tuple(V_list)))
    cond = {}
    for i, W in enumerate(V_list):
        for j, V in enumerate(V_list):
            if i == j:
                continue
            pair_h = entropy_from_counts(Counter((k[i], k[j]) for k in keys).values(), F.q)
            h = pair_h - marg[j]
            cond[(i, j)] = h
            expect = code_rank_num(C, W + V) - code_rank_num(C, V)
            if h.logq != expect:
                failures.append(("conditional", W, V))
    return EntropyReport(marg, joint, joint_sum, cond, not failures, failures)


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloEstimate:
    bits: float
    bias_bound: float
    samples: int
    seed: int


def _lin_comb(coeffs, rows, F: FieldCtx):
    """coeffs (S x k) times rows (k x N) over F, vectorized."""
    S = coeffs.shape[0]
    N = rows.shape[1]
    if F.e == 1:
        return (coeffs @ rows) % F.p
    if F.mul_table is None:
        raise InputError("Monte-Carlo sampling needs q <= 256 for extension fields")
    add = np.asarray(F.add_table)
    mul = np.asarray(F.mul_table)
    acc = np.zeros((S, N), dtype=np.int64)
    for i in range(rows.shape[0]):
        acc = add[acc, mul[coeffs[:, i][:, None], rows[i][None, :]]]
    return acc


def _plugin_entropy(keys: np.ndarray) -> tuple[float, int]:
    _, counts = np.unique(keys, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum()), len(counts)


def monte_carlo_entropy(pair: NestedPair, obs: Observation, samples: int, seed: int) -> MonteCarloEstimate:
    """Plug-in estimate of H(x | BC) in bits from seeded samples."""
    if samples < 1:
        raise InputError("samples must be positive")
    F = pair.field
    rng = np.random.default_rng(seed)
    # the map (x, y) -> (x, BC) is linear: push the generator rows through it
    gens = pair.complement + pair.C2.basis
    images = []
    for g in gens:
        images.append(flatten(obs.apply(unflatten(g, pair.n, pair.m))))
    k = len(gens)
    coeffs = rng.integers(0, F.q, size=(samples, k), dtype=np.int64)
    seen = _lin_comb(coeffs, np.asarray(images, dtype=np.int64).reshape(k, -1), F)
    x = coeffs[:, : pair.ell]
    h_joint, cells = _plugin_entropy(np.concatenate([x, seen], axis=1))
    h_seen, _ = _plugin_entropy(seen)
    bias = (cells - 1) / (2 * samples * math.log(2))
    return MonteCarloEstimate(h_joint - h_seen, bias, samples, seed)


# --------------------------------------------------------------------------
# sweeps and thresholds
# --------------------------------------------------------------------------

def universal_security_threshold(pair: NestedPair, budget: int | None = None) -> int:
    """Largest mu such that no observation of rank <= mu leaks anything."""
    L = lattice(pair.field, pair.n, budget)
    leaking = [V.dim for V in L if leakage_martinez(pair, Observation.from_subspace(V)) > 0]
    return min(leaking) - 1


@dataclass
class SweepRow:
    rowspace: Subspace
    leakage: int
    entropy: Entropy


def leakage_sweep(pair: NestedPair, budget: int | None = None):
    q = pair.field.q
    out = []
    for V in lattice(pair.field, pair.n, budget):
        leak = leakage_martinez(pair, Observation.from_subspace(V))
        out.append(SweepRow(V, leak, Entropy(pair.ell - leak, q)))
    return out


@dataclass
class RouteReport:
    passed: bool
    checked: int
    mismatches: list = dc_field(default_factory=list)


def check_leakage_routes(pair: NestedPair, P0: Subspace | None = None, subspaces=None, budget=None) -> RouteReport:
    """Direct, padded, port (when applicable) and dual-dimension routes agree exactly."""
    if P0 is not None and pair.C2 != shorten(pair.C1, orthocomplement(P0)):
        P0 = None
    rep = RouteReport(True, 0)
    for V in subspaces if subspaces is not None else lattice(pair.field, pair.n, budget):
        obs = Observation.from_subspace(V)
        vals = {
            "direct": cond_entropy_direct(pair, obs, budget),
            "padded": cond_entropy_padded(pair, obs),
            "martinez": cond_entropy_martinez(pair, obs),
        }
        if P0 is not None:
            vals["port"] = cond_entropy_port(pair.C1, P0, obs)
        rep.checked += 1
        if len(set(vals.values())) != 1:
            rep.passed = False
            rep.mismatches.append((V, {k: v.logq for k, v in vals.items()}))
    return rep


def random_nested_pair(n: int, m: int, k1: int, k2: int, seed, F: FieldCtx | None = None) -> NestedPair:
    """Seeded C2 < C1 with dim C1 = k1 and dim C2 = k2 (C2 spanned by the first rows of C1)."""
    import random

    from .code import random_code

    if not 0 <= k2 < k1:
        raise InputError("need 0 <= k2 < k1")
    C1 = random_code(n, m, k1, seed, F)
    rng = random.Random(f"{seed}/sub")
    F = C1.field
    while True:
        rows = [vecmat(tuple(rng.randrange(F.q) for _ in range(k1)), C1.basis, F, n * m) for _ in range(k2)]
        R = row_reduce(rows, F, n * m)
        if len(R) == k2:
            return NestedPair(C1, MatrixCode(F, n, m, R))
