"""Rank-metric codes: F_q-linear matrix codes and F_{q^m}-linear vector codes."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from . import config
from .errors import BudgetExceeded, InputError
from .gf import ExtBasis, FieldCtx
from .subspace import (
    Subspace,
    matmul,
    nullspace,
    orthocomplement,
    rank,
    row_reduce,
    vecmat,
)


def flatten(X):
    return tuple(x for row in X for x in row)


def unflatten(v, n: int, m: int):
    return tuple(tuple(v[i * m:(i + 1) * m]) for i in range(n))


def matrix_rank(X, F: FieldCtx) -> int:
    return rank(X, F, len(X[0]) if X else 0)


def colsp(X, F: FieldCtx) -> Subspace:
    """Column space of an n x m matrix as a subspace of F^n."""
    n = len(X)
    cols = list(zip(*X)) if X and X[0] else []
    return Subspace(F, n, row_reduce(cols, F, n))


@dataclass(frozen=True)
class MatrixCode:
    """An F_q-linear code in F_q^{n x m}.

    ``basis`` holds the RREF of the row-major flattenings, so equal codes
    compare equal.
    """

    field: FieldCtx
    n: int
    m: int
    basis: tuple = ()

    @classmethod
    def from_matrices(cls, F: FieldCtx, n: int, m: int, matrices) -> "MatrixCode":
        rows = []
        for X in matrices:
            X = tuple(tuple(int(x) for x in r) for r in X)
            if len(X) != n or any(len(r) != m for r in X):
                raise InputError(f"generator is not {n}x{m}")
            if any(not 0 <= x < F.q for r in X for x in r):
                raise InputError("matrix entry outside the field")
            rows.append(flatten(X))
        return cls(F, n, m, row_reduce(rows, F, n * m))

    @classmethod
    def zero(cls, F, n, m):
        return cls(F, n, m, ())

    @classmethod
    def full(cls, F, n, m):
        N = n * m
        return cls(F, n, m, tuple(tuple(1 if i == j else 0 for j in range(N)) for i in range(N)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def q(self) -> int:
        return self.field.q

    def matrices(self):
        return [unflatten(b, self.n, self.m) for b in self.basis]

    def num_codewords(self) -> int:
        return self.q ** self.dim

    def codewords(self, budget: int | None = None):
        """Flattened codewords; the zero word comes first."""
        limit = config.codeword_budget(budget)
        if self.num_codewords() > limit:
            raise BudgetExceeded(f"{self.num_codewords()} codewords exceed the budget of {limit}")
        F, N = self.field, self.n * self.m
        for coeffs in product(range(F.q), repeat=self.dim):
            yield vecmat(coeffs, self.basis, F, N)

    def encode(self, coeffs):
        return vecmat(coeffs, self.basis, self.field, self.n * self.m)

    def contains(self, X) -> bool:
        v = flatten(X) if X and isinstance(X[0], tuple) else tuple(X)
        return rank(self.basis + (v,), self.field, self.n * self.m) == self.dim

    def __le__(self, other: "MatrixCode") -> bool:
        return all(other.contains(b) for b in self.basis)

    def __lt__(self, other):
        return self <= other and self.dim < other.dim


def dual(C: MatrixCode) -> MatrixCode:
    """Dual under the trace form tr(X Y^t), i.e. the entrywise dot product."""
    N = C.n * C.m
    if not C.basis:
        return MatrixCode.full(C.field, C.n, C.m)
    return MatrixCode(C.field, C.n, C.m, nullspace(C.basis, C.field, N))


def shorten(C: MatrixCode, V: Subspace) -> MatrixCode:
    """C(V): the codewords whose column space lies in V."""
    if V.n != C.n or V.field != C.field:
        raise InputError("subspace ambient does not match the code length")
    F, n, m = C.field, C.n, C.m
    if not C.basis:
        return C
    A = orthocomplement(V).basis
    if not A:
        return C
    # coefficient vectors c with sum_i c_i A B_i = 0
    images = [flatten(matmul(A, unflatten(b, n, m), F)) for b in C.basis]
    cols = list(zip(*images))
    kernel = nullspace(cols, F, C.dim)
    rows = [vecmat(c, C.basis, F, n * m) for c in kernel]
    return MatrixCode(F, n, m, row_reduce(rows, F, n * m))


def min_rank_distance(C: MatrixCode, budget: int | None = None) -> int:
    if C.dim == 0:
        raise InputError("the zero code has no minimum distance")
    best = min(C.n, C.m)
    it = C.codewords(budget)
    next(it)
    for v in it:
        r = matrix_rank(unflatten(v, C.n, C.m), C.field)
        if r < best:
            best = r
            if best == 1:
                break
    return best


def singleton_bound(n: int, m: int, d: int) -> int:
    return max(m, n) * (min(m, n) - d + 1)


def is_mrd(C: MatrixCode, budget: int | None = None) -> bool:
    d = min_rank_distance(C, budget)
    return C.dim == singleton_bound(C.n, C.m, d)


def random_code(n: int, m: int, k: int, seed, F: FieldCtx | None = None) -> MatrixCode:
    """A seeded random k-dimensional code in F^{n x m}."""
    from .gf import GF

    F = F or GF(2)
    N = n * m
    if not 0 <= k <= N:
        raise InputError(f"dimension {k} not in [0, {N}]")
    rng = random.Random(seed)
    while True:
        rows = [tuple(rng.randrange(F.q) for _ in range(N)) for _ in range(k)]
        R = row_reduce(rows, F, N)
        if len(R) == k:
            return MatrixCode(F, n, m, R)


# --------------------------------------------------------------------------
# vector codes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorCode:
    """A k-dimensional F_{q^m}-linear code in F_{q^m}^n with expansion basis ``ext``."""

    ext: ExtBasis
    generator: tuple

    def __post_init__(self):
        G = tuple(tuple(int(x) for x in r) for r in self.generator)
        object.__setattr__(self, "generator", G)
        if G:
            n = len(G[0])
            if any(len(r) != n for r in G):
                raise InputError("generator rows have different lengths")
            if rank(G, self.ext.big, n) != len(G):
                raise InputError("generator rows are linearly dependent")

    @classmethod
    def from_rows(cls, ext: ExtBasis, rows, n: int | None = None):
        rows = [tuple(r) for r in rows]
        if not rows:
            return cls(ext, ())
        return cls(ext, row_reduce(rows, ext.big, len(rows[0])))

    @property
    def n(self) -> int:
        return len(self.generator[0]) if self.generator else 0

    @property
    def k(self) -> int:
        return len(self.generator)

    @property
    def m(self) -> int:
        return self.ext.m

    def codewords(self, budget: int | None = None):
        big = self.ext.big
        total = big.q ** self.k
        limit = config.codeword_budget(budget)
        if total > limit:
            raise BudgetExceeded(f"{total} codewords exceed the budget of {limit}")
        for coeffs in product(range(big.q), repeat=self.k):
            yield vecmat(coeffs, self.generator, big, self.n)

    def contains(self, v) -> bool:
        return rank(self.generator + (tuple(v),), self.ext.big, self.n) == self.k

    def dual(self) -> "VectorCode":
        """Kernel of the generator under the standard inner product over F_{q^m}."""
        if not self.generator:
            raise InputError("dual of an empty generator needs an explicit length")
        return VectorCode(self.ext, nullspace(self.generator, self.ext.big, self.n))

    def with_basis(self, ext: ExtBasis) -> "VectorCode":
        if ext.big != self.ext.big or ext.base != self.ext.base:
            raise InputError("basis belongs to a different extension")
        return VectorCode(ext, self.generator)


def expand(C: VectorCode) -> MatrixCode:
    """Pi(C): the F_q-span of the expansions of gamma * g over basis and generator rows."""
    ext = C.ext
    big = ext.big
    n, m = C.n, ext.m
    rows = []
    for g in C.generator:
        for gamma in ext.basis:
            v = tuple(big.mul(gamma, x) for x in g)
            rows.append(flatten(ext.expand_vector(v)))
    return MatrixCode(ext.base, n, m, row_reduce(rows, ext.base, n * m))


def gabidulin(n: int, k: int, ext: ExtBasis, points=None) -> VectorCode:
    """Gabidulin code with generator rows (g_1^{q^i}, ..., g_n^{q^i}), i < k."""
    if k > n:
        raise InputError("k must not exceed n")
    if n > ext.m:
        raise InputError("n must not exceed m")
    big = ext.big
    if points is None:
        x = big.p if big.e > 1 else 1
        points = [big.pow(x, i) for i in range(n)]
    points = tuple(int(g) for g in points)
    if len(points) != n:
        raise InputError(f"need {n} evaluation points")
    coords = [ext.coords(g) for g in points]
    if rank(coords, ext.base, ext.m) != n:
        raise InputError("evaluation points are linearly dependent over the subfield")
    G = [tuple(ext.frobenius(g, i) for g in points) for i in range(k)]
    return VectorCode(ext, G)
