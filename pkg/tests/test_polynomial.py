import math
import random

import numpy as np
import pytest

import oracles
from ffsums import DensePolynomial, construct_field, difference_polynomial
from ffsums.polynomial import batch_difference, iterated_difference, iterated_difference_grid, poly_from_ints


def test_difference_of_square():
    F = construct_field(7)
    P = poly_from_ints(F, [0, 0, 1])
    assert difference_polynomial(P, F(1)).coeffs == (1, 2)


def test_degree_and_arithmetic():
    F = construct_field(5)
    Z = DensePolynomial(F, [0, 0])
    assert Z.degree == -math.inf and Z.is_zero()
    P = DensePolynomial(F, [1, 2, 3])
    Q = DensePolynomial(F, [4, 0, 2])
    assert (P + Q).coeffs == (0, 2)
    assert (P * Q).degree == 4
    assert (P - P).is_zero()
    assert P(F(2)) == F((1 + 4 + 12) % 5)


@pytest.mark.parametrize("p,r", oracles.prime_powers(2, 27))
def test_evaluation_matches_oracle(p, r):
    F = construct_field(p, r)
    add, mul = oracles.tables(p, r)
    rng = random.Random(p * 100 + r)
    coeffs = [rng.randrange(F.q) for _ in range(5)]
    P = poly_from_ints(F, coeffs)
    for g in range(F.q):
        v, gp = 0, 1
        for c in coeffs:
            v = add[v][mul[c][gp]]
            gp = mul[gp][g]
        assert P.values()[g] == v


@pytest.mark.parametrize("p,r", [(7, 1), (3, 2), (2, 3), (11, 1)])
def test_shift_is_translation(p, r):
    F = construct_field(p, r)
    P = poly_from_ints(F, [3 % F.q, 1, 0, 2 % F.q, 1])
    for h in range(F.q):
        S = P.shift(F(h))
        for x in range(F.q):
            assert S(F(x)) == P(F(x) + F(h))


def test_batch_difference_matches_scalar():
    F = construct_field(5, 2)
    P = poly_from_ints(F, [3, 0, 5, 1, 2])
    H, C = iterated_difference_grid(P, 2)
    assert len(H) == (F.q - 1) ** 2
    rng = random.Random(1)
    for i in rng.sample(range(len(H)), 100):
        Q = iterated_difference(P, [F(int(h)) for h in H[i]])
        assert tuple(np.trim_zeros(C[i], "b").tolist()) == Q.coeffs
    one = batch_difference(F, np.array([[1, 2, 3]]), np.array([4]))
    assert tuple(np.trim_zeros(one[0], "b")) == difference_polynomial(poly_from_ints(F, [1, 2, 3]), F(4)).coeffs


def test_degree_drops_in_char_p():
    # x^p + x is additive, so its difference is the constant h^p + h
    F = construct_field(3, 2)
    P = poly_from_ints(F, [0, 1, 0, 1])
    h = F(5)
    assert difference_polynomial(P, h).coeffs == ((h**3 + h).value,)
