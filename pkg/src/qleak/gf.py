"""Table-backed arithmetic in F_{p^e} and in extensions F_{q^m}/F_q.

Elements are plain integers in ``[0, q)``.  The base-p digits of an
integer, least significant first, are the coefficients of its polynomial
representative modulo the field's modulus, so ``0`` is zero, ``1`` is one
and ``p`` is the class of ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import FieldError

MAX_FIELD_ORDER = 2**16

# Conway polynomials, coefficients little-endian (constant term first).
CONWAY = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
    (2, 10): (1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 12): (1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1),
    (2, 16): (1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 2, 1, 0, 2, 0, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 1, 4, 0, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (11, 1): (9, 1),
    (11, 2): (2, 7, 1),
    (13, 1): (11, 1),
    (13, 2): (2, 12, 1),
}

# fields up to this order get full q x q addition/multiplication tables
_FULL_TABLE_ORDER = 256


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _poly_divmod_is_zero(num, den, p):
    """True when ``den`` divides ``num`` over F_p (den monic)."""
    rem = list(num)
    dd = len(den) - 1
    for shift in range(len(rem) - 1 - dd, -1, -1):
        c = rem[shift + dd] % p
        if c:
            for i, d in enumerate(den):
                rem[shift + i] = (rem[shift + i] - c * d) % p
    return not any(r % p for r in rem)


def is_irreducible(poly, p: int) -> bool:
    """Exhaustive factor search over monic polynomials of degree <= deg/2."""
    poly = tuple(c % p for c in poly)
    deg = len(poly) - 1
    while deg > 0 and poly[deg] == 0:
        deg -= 1
    if deg < 1:
        return False
    poly = poly[: deg + 1]
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if _poly_divmod_is_zero(poly, low + (1,), p):
                return False
    return True


def default_modulus(p: int, e: int):
    """Conway polynomial for ``p**e`` from the built-in table."""
    try:
        return CONWAY[(p, e)]
    except KeyError:
        if e == 1 and is_prime(p):
            return (0, 1)
        raise FieldError(f"no default modulus for {p}^{e}; pass one explicitly") from None


class FieldCtx:
    """The field F_{p^e} with a fixed modulus.

    Instances are immutable and should be obtained through :func:`GF`,
    which caches one context per ``(p, e, modulus)``.
    """

    def __init__(self, p: int, e: int = 1, modulus=None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if e < 1:
            raise FieldError("extension degree must be >= 1")
        q = p**e
        if q > MAX_FIELD_ORDER:
            raise FieldError(f"field order {p}^{e} exceeds the supported cap {MAX_FIELD_ORDER}")
        if modulus is None:
            modulus = default_modulus(p, e)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {e}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.e = e
        self.q = q
        self.modulus = modulus
        self._build_tables()

    # -- construction -------------------------------------------------
    def digits(self, x: int):
        p = self.p
        out = []
        for _ in range(self.e):
            out.append(x % p)
            x //= p
        return out

    def from_digits(self, ds) -> int:
        x = 0
        for d in reversed(list(ds)):
            x = x * self.p + (d % self.p)
        return x

    def _slow_mul(self, a: int, b: int) -> int:
        p, e, mod = self.p, self.e, self.modulus
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k]
            if c:
                for i in range(e + 1):
                    prod[k - e + i] = (prod[k - e + i] - c * mod[i]) % p
        return self.from_digits(prod[:e])

    def _slow_add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def _build_tables(self):
        q = self.q
        gen = None
        for g in range(2 if q > 2 else 1, q):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = self._slow_mul(x, g)
            if len(exp) == q - 1:
                gen = g
                break
        if gen is None:  # q == 2
            gen, exp = 1, [1]
        log = [0] * q
        for i, x in enumerate(exp):
            log[x] = i
        self.generator = gen
        self._exp = exp + exp
        self._log = log
        self._neg = [self.from_digits(-d for d in self.digits(x)) for x in range(q)]
        if q <= _FULL_TABLE_ORDER:
            self.add_table = [[self._slow_add(a, b) for b in range(q)] for a in range(q)]
            self.mul_table = [[self._table_mul(a, b) for b in range(q)] for a in range(q)]
        else:
            self.add_table = None
            self.mul_table = None

    def _table_mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    # -- arithmetic on encodings ------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return self.add_table[a][b]
        return self._slow_add(a, b)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("division by zero")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise FieldError("division by zero")
            return 1 if k == 0 else 0
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def elements(self):
        return range(self.q)

    def __call__(self, value: int) -> "FieldElement":
        value = int(value)
        if not 0 <= value < self.q:
            raise FieldError(f"encoding {value} out of range for {self!r}")
        return FieldElement(value, self)

    # -- identity -----------------------------------------------------------
    def _key(self):
        return (self.p, self.e, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"

    def __reduce__(self):
        return (GF, (self.p, self.e, self.modulus))


@lru_cache(maxsize=None)
def _gf_cached(p, e, modulus):
    return FieldCtx(p, e, modulus)


def GF(p: int, e: int = 1, modulus=None) -> FieldCtx:
    """Return the (cached) context for F_{p^e}."""
    if modulus is None:
        modulus = default_modulus(p, e) if is_prime(p) else None
    return _gf_cached(p, e, None if modulus is None else tuple(int(c) for c in modulus))


@dataclass(frozen=True)
class FieldElement:
    """A field element bound to its context; supports the usual operators."""

    value: int
    ctx: FieldCtx

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise FieldError("elements live in different fields")
            return other.value
        if isinstance(other, int):
            return self.ctx(other).value
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx.add(self.value, b), self.ctx)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx.sub(self.value, b), self.ctx)

    def __rsub__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx.sub(b, self.value), self.ctx)

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx.mul(self.value, b), self.ctx)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElement(self.ctx.div(self.value, b), self.ctx)

    def __neg__(self):
        return FieldElement(self.ctx.neg(self.value), self.ctx)

    def __pow__(self, k: int):
        return FieldElement(self.ctx.pow(self.value, k), self.ctx)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.ctx!r}({self.value})"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if a.ctx != b.ctx:
        raise FieldError("elements live in different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


class ExtBasis:
    """F_{q^m} over its subfield F_q, with an F_q-basis used for expansion.

    ``big`` is F_{q^m} and ``base`` is F_q; both must share the
    characteristic and ``base.e`` must divide ``big.e``.  Elements of F_q
    are handled in ``base``'s own encoding; :meth:`embed` maps them into
    ``big``.  When ``basis`` is omitted the polynomial basis
    ``1, x, ..., x^(m-1)`` of ``big`` is used.
    """

    def __init__(self, big: FieldCtx, base: FieldCtx | None = None, basis=None):
        if base is None:
            base = GF(big.p)
        if big.p != base.p or big.e % base.e:
            raise FieldError(f"{base!r} is not a subfield of {big!r}")
        self.big = big
        self.base = base
        self.m = big.e // base.e
        self.q = base.q
        self._embed = self._embedding()
        self._unembed = {v: i for i, v in enumerate(self._embed)}
        if basis is None:
            x = big.p if big.e > 1 else 1
            basis = [big.pow(x, i) for i in range(self.m)]
        basis = tuple(int(g) for g in basis)
        if len(basis) != self.m:
            raise FieldError(f"basis must have {self.m} elements")
        self.basis = basis
        coords = {}
        for cs in product(range(self.q), repeat=self.m):
            acc = 0
            for c, g in zip(cs, basis):
                if c:
                    acc = big.add(acc, big.mul(self._embed[c], g))
            coords[acc] = cs
        if len(coords) != big.q:
            raise FieldError("basis is not linearly independent over the subfield")
        self._coords = coords

    def _embedding(self):
        big, base = self.big, self.base
        if base.e == 1:
            return list(range(base.p))
        # smallest root of base's modulus inside big
        for r in range(1, big.q):
            acc = 0
            for c in reversed(base.modulus):
                acc = big.add(big.mul(acc, r), c)
            if acc == 0:
                powers = [big.pow(r, i) for i in range(base.e)]
                out = []
                for x in range(base.q):
                    acc = 0
                    for d, pw in zip(base.digits(x), powers):
                        if d:
                            acc = big.add(acc, big.mul(d, pw))
                    out.append(acc)
                return out
        raise FieldError("failed to embed subfield")  # pragma: no cover

    def embed(self, c: int) -> int:
        """Image in F_{q^m} of an F_q element (base encoding)."""
        return self._embed[c]

    def unembed(self, x: int) -> int:
        try:
            return self._unembed[x]
        except KeyError:
            raise FieldError(f"{x} is not in the subfield") from None

    def coords(self, x: int):
        return self._coords[x]

    def from_coords(self, cs) -> int:
        big = self.big
        acc = 0
        for c, g in zip(cs, self.basis):
            if c:
                acc = big.add(acc, big.mul(self._embed[c], g))
        return acc

    def frobenius(self, x: int, i: int = 1) -> int:
        """x^(q^i)."""
        k = pow(self.q, i % self.m) if self.m else 1
        return self.big.pow(x, k)

    def trace(self, x: int) -> int:
        """Tr_{F_{q^m}/F_q}(x), returned in the subfield's encoding."""
        acc = 0
        y = x
        for _ in range(self.m):
            acc = self.big.add(acc, y)
            y = self.big.pow(y, self.q)
        return self.unembed(acc)

    def expand_vector(self, v):
        """The n x m matrix whose row i holds the coordinates of v_i."""
        return tuple(tuple(self._coords[x]) for x in v)

    def contract_matrix(self, rows):
        return tuple(self.from_coords(r) for r in rows)

    def __eq__(self, other):
        return (
            isinstance(other, ExtBasis)
            and (self.big, self.base, self.basis) == (other.big, other.base, other.basis)
        )

    def __hash__(self):
        return hash((self.big, self.base, self.basis))

    def __repr__(self):
        return f"ExtBasis({self.big!r}/{self.base!r}, basis={self.basis})"
