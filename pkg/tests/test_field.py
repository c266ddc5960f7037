import pickle

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ffsums import (
    FieldElement,
    absolute_trace,
    add,
    construct_field,
    enumerate_field,
    field_of_order,
    inv,
    mul,
    multiplicative_generator,
    neg,
    power,
)
from ffsums.errors import DivisionByZero, FieldMismatch, NotPrime, TooLarge
from ffsums.field import CEILING, is_irreducible, least_irreducible, prime_power

SMALL = oracles.prime_powers(2, 256)
TINY = oracles.prime_powers(2, 49)


@pytest.mark.parametrize("p,r", SMALL)
def test_modulus_is_least_irreducible(p, r):
    assert construct_field(p, r).modulus == oracles.least_irreducible(p, r)


@pytest.mark.parametrize("p,r", [(2, 9), (3, 5), (5, 3), (7, 3)])
def test_modulus_larger_degrees(p, r):
    assert construct_field(p, r).modulus == oracles.least_irreducible(p, r)


def test_known_moduli():
    assert construct_field(2, 2).modulus == (1, 1, 1)
    assert construct_field(2, 3).modulus == (1, 1, 0, 1)
    assert construct_field(3, 2).modulus == (1, 0, 1)
    assert construct_field(7).modulus == (0, 1)


@pytest.mark.parametrize("p,deg", [(2, 4), (3, 3), (5, 2)])
def test_rabin_matches_trial_division(p, deg):
    for f in oracles.all_monic(p, deg):
        assert is_irreducible(f, p) == oracles.is_irreducible_bruteforce(f, p), f


@pytest.mark.parametrize("p,r", TINY)
def test_tables_match_oracle(p, r):
    F = construct_field(p, r)
    add_t, mul_t = oracles.tables(p, r)
    codes = np.arange(F.q)
    assert np.array_equal(F.add_codes(codes[:, None], codes[None, :]), np.array(add_t))
    assert np.array_equal(F.mul_codes(codes[:, None], codes[None, :]), np.array(mul_t))


@pytest.mark.parametrize("p,r", TINY)
def test_generator_is_least_primitive(p, r):
    F = construct_field(p, r)
    N = oracles.naive_field(p, r)
    expected = next(n for n in range(1, F.q) if N.order(N.from_code(n)) == F.q - 1)
    assert multiplicative_generator(F).value == expected


@pytest.mark.parametrize("p,r", TINY)
def test_trace_matches_oracle(p, r):
    F = construct_field(p, r)
    N = oracles.naive_field(p, r)
    expected = [N.trace(N.from_code(n)) for n in range(F.q)]
    assert F.trace_table.tolist() == expected
    assert [absolute_trace(x) for x in enumerate_field(F)] == expected


@pytest.mark.parametrize("p,r", [(2, 5), (3, 3), (13, 1), (5, 2)])
def test_pow_and_inverse_match_oracle(p, r):
    F = construct_field(p, r)
    N = oracles.naive_field(p, r)
    for d in (0, 1, 2, 3, 7, F.q - 2):
        assert F.pow_codes(np.arange(F.q), d).tolist() == oracles.pow_table(p, r, d)
    for x in F.elements()[1:]:
        assert (x * x.inverse()) == F.one
        assert N.mul(N.from_code(x.value), N.from_code(x.inverse().value)) == N.from_code(1)


def test_large_field_consistency():
    F = construct_field(2, 20)
    assert F.q == CEILING
    g = multiplicative_generator(F)
    assert len(np.unique(F.exp_table[: F.q - 1])) == F.q - 1
    rng = np.random.default_rng(0)
    xs = rng.integers(1, F.q, size=2000)
    ys = rng.integers(1, F.q, size=2000)
    # log-table product against the schoolbook digit product
    assert np.array_equal(F.mul_codes(xs, ys), F._mul_digits(xs, ys))
    assert g ** (F.q - 1) == F.one
    assert all(F.trace_table[x] == F._trace_by_definition(int(x)) for x in xs[:50])


def test_errors():
    with pytest.raises(NotPrime):
        construct_field(6)
    with pytest.raises(NotPrime):
        field_of_order(12)
    with pytest.raises(TooLarge):
        construct_field(2, 21)
    with pytest.raises(ValueError):
        construct_field(5, 0)
    F, G = construct_field(5), construct_field(7)
    with pytest.raises(FieldMismatch):
        F(1) + G(1)
    with pytest.raises(DivisionByZero):
        F(1) / F(0)
    with pytest.raises(ZeroDivisionError):
        inv(F(0))
    with pytest.raises(ValueError):
        F(5)


def test_element_interface():
    F = construct_field(3, 2)
    x = F.element([1, 2])
    assert x.value == 7 and x.rep == (1, 2) and int(x) == 7
    assert F.scalar(-1) == F(2)
    assert repr(x) == "GF9(7)"
    assert x ** -1 == x.inverse()
    assert x - x == F.zero and not F.zero and bool(F.one)
    assert sorted([F(3), F(1)]) == [F(1), F(3)]
    assert add(x, neg(x)) == F.zero and mul(x, inv(x)) == F.one and power(x, 8) == F.one
    assert prime_power(81) == (3, 4) and prime_power(100) is None
    assert least_irreducible(2, 4) == (1, 1, 0, 0, 1)


def test_pickle_roundtrip():
    F = construct_field(3, 4)
    G = pickle.loads(pickle.dumps(F))
    assert G == F and hash(G) == hash(F)
    x = pickle.loads(pickle.dumps(F(17)))
    assert x == F(17) and isinstance(x, FieldElement)


FIELDS = st.sampled_from([(2, 1), (2, 8), (3, 5), (5, 4), (7, 1), (101, 1), (2, 20), (3, 12), (1021, 2)])


@st.composite
def triples(draw):
    p, r = draw(FIELDS)
    F = construct_field(p, r)
    el = st.integers(0, F.q - 1).map(F)
    return F, draw(el), draw(el), draw(el)


@settings(max_examples=300, deadline=None)
@given(triples())
def test_field_axioms(t):
    F, x, y, z = t
    assert x + y == y + x and x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + F.zero == x and x * F.one == x
    assert x + (-x) == F.zero
    if x:
        assert x * x.inverse() == F.one
        assert x ** (F.q - 1) == F.one
    # Frobenius is additive
    assert (x + y) ** F.p == x**F.p + y**F.p
    assert absolute_trace(x + y) == (absolute_trace(x) + absolute_trace(y)) % F.p
