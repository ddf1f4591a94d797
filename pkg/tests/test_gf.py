from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, strategies as st

from qleak.errors import FieldError
from qleak.gf import CONWAY, GF, ExtBasis, field_arith


# -- an independent polynomial oracle -------------------------------------

def _polymod(a, f, p):
    a = list(a)
    while len(a) >= len(f):
        c = a[-1] % p
        if c:
            shift = len(a) - len(f)
            for i, fc in enumerate(f):
                a[shift + i] = (a[shift + i] - c * fc) % p
        a.pop()
    return [x % p for x in a]


def _polymul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _irreducible(f, p):
    e = len(f) - 1
    for d in range(1, e // 2 + 1):
        for tail in product(range(p), repeat=d):
            g = list(tail) + [1]
            if not any(_polymod(f, g, p)):
                return False
    return True


def _order_of_x(f, p):
    e = len(f) - 1
    one = [1] + [0] * (e - 1)
    cur = _polymod([0, 1], f, p) + [0] * e
    cur = cur[:e]
    k = 1
    while cur != one:
        cur = (_polymod(_polymul(cur, [0, 1], p), f, p) + [0] * e)[:e]
        k += 1
    return k


SMALL = [(p, e) for (p, e) in CONWAY if p**e <= 2**10]


@pytest.mark.parametrize("p,e", SMALL)
def test_conway_table_irreducible_and_primitive(p, e):
    f = CONWAY[(p, e)]
    assert f[-1] == 1 and len(f) == e + 1
    assert _irreducible(list(f), p)
    if e > 1:
        assert _order_of_x(list(f), p) == p**e - 1


@pytest.mark.parametrize("p,e", [(2, 3), (3, 2), (2, 4)])
def test_multiplication_matches_polynomial_oracle(p, e):
    F = GF(p, e)
    f = list(F.modulus)
    for a, b in product(range(F.q), repeat=2):
        pa, pb = F.digits(a), F.digits(b)
        want = (_polymod(_polymul(list(pa), list(pb), p), f, p) + [0] * e)[:e]
        assert list(F.digits(F.mul(a, b))) == want


FIELDS = [GF(2), GF(3), GF(5), GF(2, 2), GF(2, 3), GF(3, 2), GF(2, 4)]


@given(st.sampled_from(FIELDS), st.data())
def test_field_axioms(F, data):
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.add(a, F.add(b, c)) == F.add(F.add(a, b), c)
    assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    assert F.sub(F.add(a, b), b) == a
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.div(F.mul(b, a), a) == b
    assert F.pow(a, F.q) == a


def test_element_wrapper():
    F = GF(2, 2)
    x = F(2)
    assert int(x * x) == 3  # x^2 = x + 1
    assert int(x + 1) == 3
    assert int(field_arith(x, F(3), "mul")) == 1
    with pytest.raises(FieldError):
        x / F(0)


@pytest.mark.parametrize(
    "args",
    [(4, 1), (2, 0), (2, 2, (1, 0, 1)), (2, 2, (1, 1)), (2, 17)],
)
def test_bad_fields_rejected(args):
    with pytest.raises(FieldError):
        GF(*args)


def test_gf_is_cached():
    assert GF(2, 3) is GF(2, 3)
    assert GF(2, 3) != GF(2, 3, (1, 0, 1, 1))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_extension_expand_roundtrip(m):
    big = GF(2, m)
    ext = ExtBasis(big, GF(2))
    for x in range(big.q):
        assert ext.from_coords(ext.coords(x)) == x
    v = tuple(range(min(big.q, 4)))
    assert ext.contract_matrix(ext.expand_vector(v)) == v


def test_trace_is_linear_and_onto():
    big = GF(2, 3)
    ext = ExtBasis(big, GF(2))
    values = {ext.trace(x) for x in range(big.q)}
    assert values == {0, 1}
    for a, b in product(range(big.q), repeat=2):
        assert ext.trace(big.add(a, b)) == (ext.trace(a) + ext.trace(b)) % 2
        assert ext.frobenius(ext.frobenius(a)) == big.mul(big.mul(a, a), big.mul(a, a))


def test_custom_basis_must_be_independent():
    big = GF(2, 2)
    with pytest.raises(FieldError):
        ExtBasis(big, GF(2), (1, 1))
    ext = ExtBasis(big, GF(2), (2, 3))
    assert ext.from_coords(ext.coords(1)) == 1
