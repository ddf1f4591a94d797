"""q-polymatroids with exact rational ranks over a fixed denominator."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import config
from .code import MatrixCode, shorten
from .errors import BudgetExceeded, InputError
from .gf import FieldCtx
from .subspace import (
    BilinearForm,
    Subspace,
    embed,
    full_space,
    image,
    inverse,
    lattice,
    lift,
    matmul,
    orthocomplement,
    quotient,
    rank as mat_rank,
    zero_space,
)


@lru_cache(maxsize=32)
def lattice_tables(F: FieldCtx, n: int):
    """Index map plus join / meet / order tables for L(F^n)."""
    L = lattice(F, n)
    index = {V: i for i, V in enumerate(L)}
    N = len(L)
    join = [[0] * N for _ in range(N)]
    meet = [[0] * N for _ in range(N)]
    for i in range(N):
        join[i][i] = meet[i][i] = i
        for j in range(i + 1, N):
            s = index[L[i] + L[j]]
            t = index[L[i] & L[j]]
            join[i][j] = join[j][i] = s
            meet[i][j] = meet[j][i] = t
    return L, index, join, meet


class QPolymatroid:
    """A q-polymatroid on F_q^n.

    Ranks are stored as integer numerators over the common denominator
    ``denom``; :meth:`rank` returns exact :class:`~fractions.Fraction` values.
    ``frame``, when set, is a basis of the ground space inside some larger
    space the polymatroid was cut out of.
    """

    def __init__(self, field: FieldCtx, n: int, denom: int, table, frame=None, source=None):
        self.field = field
        self.n = n
        self.denom = denom
        self.table = dict(table)
        self.frame = frame
        self.source = source
        if zero_space(field, n) in self.table and self.table[zero_space(field, n)] != 0:
            raise InputError("rank of the zero space must be 0")

    # -- evaluation -------------------------------------------------------
    def _num(self, V: Subspace) -> int:
        if V.n != self.n or V.field != self.field:
            raise InputError(f"subspace of F^{V.n} does not live in the ground space F^{self.n}")
        return self.table[V]

    def rank_num(self, V: Subspace) -> int:
        return self._num(V)

    def rank(self, V: Subspace) -> Fraction:
        return Fraction(self._num(V), self.denom)

    def cond_rank(self, V: Subspace, W: Subspace) -> Fraction:
        return Fraction(self._num(V + W) - self._num(W), self.denom)

    @property
    def ground(self) -> Subspace:
        return full_space(self.field, self.n)

    def total_rank(self) -> Fraction:
        return self.rank(self.ground)

    def subspaces(self):
        return lattice(self.field, self.n)

    def __eq__(self, other):
        if not isinstance(other, QPolymatroid):
            return NotImplemented
        if (self.field, self.n) != (other.field, other.n):
            return False
        return all(
            self.table[V] * other.denom == other.table[V] * self.denom for V in self.subspaces()
        )

    def __hash__(self):
        return hash((self.field, self.n, frozenset((V, self.rank(V)) for V in self.subspaces())))

    def __repr__(self):
        return f"QPolymatroid(q={self.field.q}, n={self.n}, denom={self.denom})"

    # -- derived polymatroids ----------------------------------------------
    def dual(self, form: BilinearForm | None = None) -> "QPolymatroid":
        """rho*(V) = dim V - rho(E) + rho(V^perp)."""
        m = self.denom
        top = self.table[self.ground]
        table = {
            V: m * V.dim - top + self.table[orthocomplement(V, form)] for V in self.subspaces()
        }
        return QPolymatroid(self.field, self.n, m, table)

    def restrict(self, Z: Subspace) -> "QPolymatroid":
        """M|_Z re-coordinatized so Z's RREF basis becomes the standard basis."""
        if Z.n != self.n:
            raise InputError("restriction space does not match the ground space")
        table = {U: self.table[embed(U, Z.basis, self.n)] for U in lattice(self.field, Z.dim)}
        frame = Z.basis if self.frame is None else _compose(Z.basis, self.frame, self.field)
        return QPolymatroid(self.field, Z.dim, self.denom, table, frame=frame)

    def contract(self, Z: Subspace) -> "QPolymatroid":
        """M/Z on the quotient coordinates: rho(pi^{-1}(V)) - rho(Z)."""
        ctx = quotient(Z)
        base = self.table[Z]
        table = {U: self.table[lift(ctx, U)] - base for U in lattice(self.field, ctx.dim)}
        return QPolymatroid(self.field, ctx.dim, self.denom, table)

    def relabel(self, P) -> "QPolymatroid":
        """The polymatroid V -> rho(V P^{-1}), i.e. M transported along x -> x P."""
        Pinv = inverse(P, self.field)
        table = {V: self.table[image(V, Pinv, self.n)] for V in self.subspaces()}
        return QPolymatroid(self.field, self.n, self.denom, table)

    # -- q-matroid predicates ------------------------------------------------
    def is_q_matroid(self) -> bool:
        return all(v % self.denom == 0 for v in self.table.values())

    def _require_q_matroid(self):
        if not self.is_q_matroid():
            raise InputError("rank table is not integral; predicate needs a q-matroid")

    def is_independent(self, V: Subspace) -> bool:
        self._require_q_matroid()
        return self._num(V) == self.denom * V.dim

    def is_basis(self, V: Subspace) -> bool:
        self._require_q_matroid()
        top = self.table[self.ground]
        return self.is_independent(V) and self._num(V) == top

    def circuits(self):
        """Dependent spaces all of whose proper subspaces are independent."""
        self._require_q_matroid()
        L = self.subspaces()
        dependent = [V for V in L if not self.is_independent(V)]
        out = []
        for V in dependent:
            if not any(W < V for W in dependent if W.dim < V.dim):
                out.append(V)
        return out

    def is_integral_on(self, Z: Subspace) -> bool:
        return self.restrict(Z).is_q_matroid()


def _compose(inner, outer, F):
    return matmul(inner, outer, F)


def from_code(C: MatrixCode, budget: int | None = None) -> QPolymatroid:
    """The q-polymatroid rho_C(V) = (dim C - dim C(V^perp)) / m."""
    L = lattice(C.field, C.n, budget)
    table = {V: C.dim - shorten(C, orthocomplement(V)).dim for V in L}
    return QPolymatroid(C.field, C.n, C.m, table, source=C)


def code_rank_num(C: MatrixCode, V: Subspace) -> int:
    """Numerator of rho_C(V) without building the whole table."""
    return C.dim - shorten(C, orthocomplement(V)).dim


def uniform(n: int, k: int, F: FieldCtx) -> QPolymatroid:
    if not 0 <= k <= n:
        raise InputError(f"uniform q-matroid needs 0 <= k <= n, got k={k}, n={n}")
    table = {V: min(V.dim, k) for V in lattice(F, n)}
    return QPolymatroid(F, n, 1, table)


def from_function(F: FieldCtx, n: int, denom: int, fn) -> QPolymatroid:
    return QPolymatroid(F, n, denom, {V: fn(V) for V in lattice(F, n)})


@dataclass
class AxiomReport:
    violations: list = dc_field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_axioms(M: QPolymatroid, limit: int = 20) -> AxiomReport:
    """Exhaustive check of boundedness, monotonicity and submodularity.

    At most ``limit`` violations are recorded.
    """
    L, index, join, meet = lattice_tables(M.field, M.n)
    r = [M.table[V] for V in L]
    m = M.denom
    report = AxiomReport()
    N = len(L)
    for i, V in enumerate(L):
        report.checked += 1
        if not 0 <= r[i] <= m * V.dim:
            report.violations.append(("R1", V))
    for i in range(N):
        for j in range(i + 1, N):
            report.checked += 1
            s, t = join[i][j], meet[i][j]
            if s == j and r[i] > r[j]:
                report.violations.append(("R2", L[i], L[j]))
            elif s == i and r[j] > r[i]:
                report.violations.append(("R2", L[j], L[i]))
            if r[s] + r[t] > r[i] + r[j]:
                report.violations.append(("R3", L[i], L[j]))
            if len(report.violations) >= limit:
                return report
    return report


# --------------------------------------------------------------------------
# equivalence
# --------------------------------------------------------------------------

def _rank_profile(M: QPolymatroid):
    prof = {}
    for V in M.subspaces():
        prof.setdefault(V.dim, []).append(Fraction(M.table[V], M.denom))
    return {d: sorted(v) for d, v in prof.items()}


def find_equivalence(M1: QPolymatroid, M2: QPolymatroid, budget: int | None = None):
    """An invertible P with rho2(V P) = rho1(V) for every V, or ``None``.

    The search walks GL(n, q) by choosing images of e_1, e_2, ... in turn
    and checks every subspace of <e_1..e_j> as soon as its image is fixed.
    """
    if (M1.field, M1.n) != (M2.field, M2.n):
        return None
    if _rank_profile(M1) != _rank_profile(M2):
        return None
    F, n = M1.field, M1.n
    limit = config.group_budget(budget)
    # subspaces first fully determined once e_1..e_j are mapped
    by_level = [[] for _ in range(n + 1)]
    for V in M1.subspaces():
        last = max((max(j for j, x in enumerate(v) if x) for v in V.basis), default=-1)
        by_level[last + 1].append(V)
    vectors = [v for v in product(range(F.q), repeat=n) if any(v)]
    visited = 0
    chosen = []

    def ok(level):
        P = tuple(chosen) + tuple((0,) * n for _ in range(n - len(chosen)))
        for V in by_level[level]:
            W = image(V, P, n)
            if M2.table[W] * M1.denom != M1.table[V] * M2.denom:
                return False
        return True

    def search(level):
        nonlocal visited
        if level == n:
            return True
        for v in vectors:
            visited += 1
            if visited > limit:
                raise BudgetExceeded(f"equivalence search exceeded {limit} nodes")
            if mat_rank(chosen + [v], F, n) != level + 1:
                continue
            chosen.append(v)
            if ok(level + 1) and search(level + 1):
                return True
            chosen.pop()
        return False

    if search(0):
        return tuple(tuple(r) for r in chosen)
    return None


def is_equivalence(M1: QPolymatroid, M2: QPolymatroid, P) -> bool:
    if mat_rank(P, M1.field, M1.n) != M1.n:
        return False
    return all(
        M2.table[image(V, P, M1.n)] * M1.denom == M1.table[V] * M2.denom for V in M1.subspaces()
    )


def free(n: int, F: FieldCtx) -> QPolymatroid:
    return uniform(n, n, F)


# --------------------------------------------------------------------------
# code-level identities
# --------------------------------------------------------------------------

def duality_mismatches(C: MatrixCode, budget: int | None = None):
    """Subspaces where dual(M_C) and M_{C^perp} disagree (empty when the identity holds)."""
    from .code import dual

    lhs = from_code(C, budget).dual()
    rhs = from_code(dual(C), budget)
    return [V for V in lhs.subspaces() if lhs.rank_num(V) != rhs.rank_num(V)]


def ccdual_mismatches(C: MatrixCode, budget: int | None = None):
    """V violating dim Cperp(V) = dim Cperp - m dim V^perp + dim C(V^perp)."""
    from .code import dual

    D = dual(C)
    out = []
    for V in lattice(C.field, C.n, budget):
        Vp = orthocomplement(V)
        if shorten(D, V).dim != D.dim - C.m * Vp.dim + shorten(C, Vp).dim:
            out.append(V)
    return out


__all__ = [
    "AxiomReport",
    "QPolymatroid",
    "ccdual_mismatches",
    "code_rank_num",
    "duality_mismatches",
    "find_equivalence",
    "free",
    "from_code",
    "from_function",
    "is_equivalence",
    "lattice_tables",
    "uniform",
    "verify_axioms",
]
