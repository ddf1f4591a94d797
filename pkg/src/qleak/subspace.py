"""Subspaces of F_q^n in canonical (RREF) form, and the lattice operations on them.

Matrices are tuples of row tuples of field encodings; the field is passed
alongside.  A :class:`Subspace` stores the nonzero rows of its reduced row
echelon form, so two subspaces are equal exactly when those rows agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import combinations, product

from . import config
from .errors import BudgetExceeded, InputError
from .gf import FieldCtx


# --------------------------------------------------------------------------
# matrix helpers
# --------------------------------------------------------------------------

def rref(rows, F: FieldCtx, ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(matrix, rank)`` where ``matrix`` has the same shape as the
    input with zero rows moved to the bottom.
    """
    M = [list(r) for r in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    add, mul, inv, neg = F.add, F.mul, F.inv, F.neg
    r = 0
    nrows = len(M)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        if pr[c] != 1:
            s = inv(pr[c])
            pr = [mul(s, x) for x in pr]
            M[r] = pr
        for i in range(nrows):
            if i != r:
                row = M[i]
                f = row[c]
                if f:
                    nf = neg(f)
                    M[i] = [add(a, mul(nf, b)) if b else a for a, b in zip(row, pr)]
        r += 1
    return tuple(tuple(row) for row in M), r


def row_reduce(rows, F: FieldCtx, ncols: int):
    """Nonzero rows of the RREF, as a tuple of tuples."""
    M, r = rref(rows, F, ncols)
    return M[:r]


def rank(rows, F: FieldCtx, ncols: int | None = None) -> int:
    return rref(rows, F, ncols)[1]


def pivots_of(rows):
    return tuple(next(j for j, x in enumerate(r) if x) for r in rows)


def nullspace(rows, F: FieldCtx, ncols: int):
    """Basis (RREF) of ``{x : rows @ x = 0}``."""
    R = row_reduce(rows, F, ncols)
    piv = pivots_of(R)
    free = [j for j in range(ncols) if j not in piv]
    out = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, c in zip(R, piv):
            v[c] = F.neg(row[f])
        out.append(tuple(v))
    return row_reduce(out, F, ncols)


def matmul(A, B, F: FieldCtx):
    if not A:
        return ()
    cols = list(zip(*B)) if B else []
    add, mul = F.add, F.mul
    out = []
    for row in A:
        r = []
        for col in cols:
            acc = 0
            for a, b in zip(row, col):
                if a and b:
                    acc = add(acc, mul(a, b))
            r.append(acc)
        out.append(tuple(r))
    return tuple(out)


def vecmat(v, B, F: FieldCtx, ncols: int):
    """Row vector times matrix."""
    add, mul = F.add, F.mul
    acc = [0] * ncols
    for a, row in zip(v, B):
        if a:
            for j, b in enumerate(row):
                if b:
                    acc[j] = add(acc[j], mul(a, b))
    return tuple(acc)


def transpose(A, ncols: int | None = None):
    if not A:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*A))


def identity(n: int):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def inverse(A, F: FieldCtx):
    n = len(A)
    aug = [tuple(row) + identity(n)[i] for i, row in enumerate(A)]
    R, r = rref(aug, F, 2 * n)
    if any(tuple(R[i][:n]) != identity(n)[i] for i in range(n)):
        raise InputError("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


# --------------------------------------------------------------------------
# bilinear forms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BilinearForm:
    """Non-degenerate symmetric bilinear form given by its Gram matrix."""

    field: FieldCtx
    gram: tuple

    def __post_init__(self):
        g = tuple(tuple(r) for r in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(r) != n for r in g):
            raise InputError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise InputError("Gram matrix must be symmetric")
        if rank(g, self.field, n) != n:
            raise InputError("bilinear form is degenerate")

    @property
    def n(self):
        return len(self.gram)

    @classmethod
    def standard(cls, F: FieldCtx, n: int) -> "BilinearForm":
        return _standard_form(F, n)

    @property
    def is_standard(self):
        return self.gram == identity(self.n)

    def __call__(self, u, v):
        return sum_dot(vecmat(u, self.gram, self.field, self.n), v, self.field)


@lru_cache(maxsize=None)
def _standard_form(F, n):
    return BilinearForm(F, identity(n))


def sum_dot(u, v, F: FieldCtx) -> int:
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = F.add(acc, F.mul(a, b))
    return acc


# --------------------------------------------------------------------------
# subspaces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    field: FieldCtx
    n: int
    basis: tuple = ()
    _pivots: tuple = dc_field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self._pivots is None:
            object.__setattr__(self, "_pivots", pivots_of(self.basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self):
        return self._pivots

    def sort_key(self):
        return (self.dim, self.basis)

    def __lt__(self, other):
        return self <= other and self != other

    def __le__(self, other):
        _check_ambient(self, other)
        if self.dim > other.dim:
            return False
        return all(other.contains(v) for v in self.basis)

    def __ge__(self, other):
        return other <= self

    def __gt__(self, other):
        return other < self

    def contains(self, v) -> bool:
        return not any(reduce_vector(v, self.basis, self._pivots, self.field))

    def __add__(self, other):
        return sum_spaces(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def vectors(self):
        """All vectors of the subspace."""
        F = self.field
        for coeffs in product(range(F.q), repeat=self.dim):
            yield vecmat(coeffs, self.basis, F, self.n)

    def __repr__(self):
        if not self.basis:
            return f"<0 in F_{self.field.q}^{self.n}>"
        return "<" + ", ".join(format_vector(v) for v in self.basis) + ">"


def format_vector(v) -> str:
    """``e1+e3`` style when entries are 0/1, otherwise a coordinate tuple."""
    if all(x in (0, 1) for x in v) and any(v):
        return "+".join(f"e{i + 1}" for i, x in enumerate(v) if x)
    return "(" + ",".join(str(x) for x in v) + ")"


def _check_ambient(V, W):
    if V.n != W.n or V.field != W.field:
        raise InputError(f"ambient mismatch: F_{V.field.q}^{V.n} vs F_{W.field.q}^{W.n}")


def reduce_vector(v, basis, pivots, F: FieldCtx):
    v = list(v)
    for row, c in zip(basis, pivots):
        f = v[c]
        if f:
            nf = F.neg(f)
            v = [F.add(a, F.mul(nf, b)) if b else a for a, b in zip(v, row)]
    return v


def span(rows, n: int, F: FieldCtx) -> Subspace:
    rows = [tuple(r) for r in rows]
    for r in rows:
        if len(r) != n:
            raise InputError(f"vector {r} has length {len(r)}, expected {n}")
    return Subspace(F, n, row_reduce(rows, F, n))


def zero_space(F: FieldCtx, n: int) -> Subspace:
    return Subspace(F, n, ())


def full_space(F: FieldCtx, n: int) -> Subspace:
    return Subspace(F, n, identity(n))


def sum_spaces(V: Subspace, W: Subspace) -> Subspace:
    _check_ambient(V, W)
    if not W.basis:
        return V
    if not V.basis:
        return W
    return span(V.basis + W.basis, V.n, V.field)


def orthocomplement(V: Subspace, form: BilinearForm | None = None) -> Subspace:
    F, n = V.field, V.n
    if form is None or form.is_standard:
        rows = V.basis
    else:
        if form.n != n or form.field != F:
            raise InputError("form does not match the ambient space")
        rows = matmul(V.basis, form.gram, F)
    if not rows:
        return full_space(F, n)
    return Subspace(F, n, nullspace(rows, F, n))


def intersect(V: Subspace, W: Subspace) -> Subspace:
    _check_ambient(V, W)
    if V <= W:
        return V
    if W <= V:
        return W
    return orthocomplement(sum_spaces(orthocomplement(V), orthocomplement(W)))


def adapted_form(Z: Subspace) -> BilinearForm:
    """A form under which ``Z`` and its orthogonal complement split the space."""
    F, n = Z.field, Z.n
    std = BilinearForm.standard(F, n)
    if intersect(Z, orthocomplement(Z)).dim == 0:
        return std
    piv = set(Z.pivots)
    T = Z.basis + tuple(identity(n)[j] for j in range(n) if j not in piv)
    # rows of T orthonormal:  T G T^t = I  =>  G = (T^t T)^-1
    G = inverse(matmul(transpose(T), T, F), F)
    return BilinearForm(F, G)


def image(V: Subspace, M, n_out: int) -> Subspace:
    """Row space of ``basis(V) @ M``, i.e. the image of V under x -> x M."""
    F = V.field
    return Subspace(F, n_out, row_reduce([vecmat(r, M, F, n_out) for r in V.basis], F, n_out))


def embed(U: Subspace, frame, n_out: int) -> Subspace:
    """Map a subspace given in the coordinates of ``frame`` (a basis) to the ambient space."""
    return image(U, frame, n_out)


def coordinates(V: Subspace, frame) -> Subspace:
    """Coordinates of ``V`` (contained in the span of the RREF ``frame``) relative to ``frame``."""
    F = V.field
    piv = pivots_of(frame)
    k = len(frame)
    rows = []
    for v in V.basis:
        u = tuple(v[c] for c in piv)
        if vecmat(u, frame, F, V.n) != tuple(v):
            raise InputError(f"{format_vector(v)} is not in the span of the frame")
        rows.append(u)
    return Subspace(F, k, row_reduce(rows, F, k))


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------

def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _rref_patterns(n, k, F):
    """All k x n RREF matrices of rank k, in lexicographic order per pivot set."""
    q = F.q
    out = []
    for piv in combinations(range(n), k):
        free = [(i, j) for i in range(k) for j in range(piv[i] + 1, n) if j not in piv]
        for vals in product(range(q), repeat=len(free)):
            M = [[0] * n for _ in range(k)]
            for i, c in enumerate(piv):
                M[i][c] = 1
            for (i, j), x in zip(free, vals):
                M[i][j] = x
            out.append(tuple(tuple(r) for r in M))
    return out


@lru_cache(maxsize=64)
def _lattice(F: FieldCtx, n: int, k):
    dims = range(n + 1) if k is None else [k]
    out = []
    for d in dims:
        spaces = [Subspace(F, n, b) for b in _rref_patterns(n, d, F)]
        spaces.sort(key=Subspace.sort_key)
        out.extend(spaces)
    return tuple(out)


def count_subspaces(n: int, q: int, dim_filter: int | None = None) -> int:
    if dim_filter is not None:
        return gaussian_binomial(n, dim_filter, q)
    return sum(gaussian_binomial(n, k, q) for k in range(n + 1))


def enumerate_subspaces(V: Subspace, dim_filter: int | None = None, budget: int | None = None):
    """Every subspace of ``V`` exactly once, ordered by dimension then RREF."""
    F = V.field
    if dim_filter is not None and not 0 <= dim_filter <= V.dim:
        return []
    total = count_subspaces(V.dim, F.q, dim_filter)
    limit = config.subspace_budget(budget)
    if total > limit:
        raise BudgetExceeded(f"{total} subspaces exceed the budget of {limit}")
    inner = _lattice(F, V.dim, dim_filter)
    if V.dim == V.n:
        return inner
    out = [image(U, V.basis, V.n) for U in inner]
    out.sort(key=Subspace.sort_key)
    return tuple(out)


def lattice(F: FieldCtx, n: int, budget: int | None = None):
    """All subspaces of F^n in canonical order (cached)."""
    return enumerate_subspaces(full_space(F, n), None, budget)


def one_dim_subspaces(V: Subspace, budget: int | None = None):
    return enumerate_subspaces(V, 1, budget)


# --------------------------------------------------------------------------
# quotients
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuotientCtx:
    """F^n / Z coordinatized by the non-pivot positions of RREF(Z)."""

    Z: Subspace

    @property
    def field(self):
        return self.Z.field

    @property
    def n(self):
        return self.Z.n

    @property
    def coords(self):
        piv = set(self.Z.pivots)
        return tuple(j for j in range(self.Z.n) if j not in piv)

    @property
    def dim(self):
        return self.Z.n - self.Z.dim

    def project_vector(self, v):
        r = reduce_vector(v, self.Z.basis, self.Z.pivots, self.field)
        return tuple(r[j] for j in self.coords)

    def lift_vector(self, u):
        v = [0] * self.n
        for j, x in zip(self.coords, u):
            v[j] = x
        return tuple(v)

    def section(self) -> Subspace:
        """The coordinate complement of Z."""
        return span([self.lift_vector(r) for r in identity(self.dim)], self.n, self.field)


def quotient(Z: Subspace) -> QuotientCtx:
    return QuotientCtx(Z)


def project(ctx: QuotientCtx, V: Subspace) -> Subspace:
    if V.n != ctx.n or V.field != ctx.field:
        raise InputError("subspace does not live in the quotient's ambient space")
    return span([ctx.project_vector(v) for v in V.basis], ctx.dim, ctx.field)


def lift(ctx: QuotientCtx, Vbar: Subspace) -> Subspace:
    if Vbar.n != ctx.dim or Vbar.field != ctx.field:
        raise InputError("subspace is not given in quotient coordinates")
    rows = [ctx.lift_vector(u) for u in Vbar.basis] + list(ctx.Z.basis)
    return span(rows, ctx.n, ctx.field)
