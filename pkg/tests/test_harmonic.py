import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ffsums import DensePolynomial, construct_field
from ffsums.errors import DegreeNotCoprime, DegreeOutOfRange, DegreeTooSmall, PrincipalCharacter
from ffsums.harmonic import (
    CenteredShift,
    averaged_intersection_deviation,
    averaging_terms,
    character,
    character_matrix,
    counterexample_char_divides,
    elementary_base,
    error_fn_elementary,
    error_fn_fourier,
    fourier_deviation,
    fourier_invert,
    fourier_transform,
    indicator,
    plancherel_check,
    shift_average,
    verify_lemma8,
    verify_lemma12,
    verify_weil,
    weil_sum,
    weil_sums_all,
)
from ffsums.polynomial import poly_from_ints


@pytest.mark.parametrize("p,r", oracles.prime_powers(2, 27))
def test_characters_are_homomorphisms(p, r):
    F = construct_field(p, r)
    add, _ = oracles.tables(p, r)
    for label in range(F.q):
        chi = character(F, label)
        v = chi.values()
        assert np.allclose(np.abs(v), 1)
        for x in range(F.q):
            for y in range(0, F.q, max(1, F.q // 5)):
                assert cmath.isclose(v[add[x][y]], v[x] * v[y], abs_tol=1e-12)
    assert character(F, 0).is_principal and not character(F, 1).is_principal


@pytest.mark.parametrize("p,r", oracles.prime_powers(2, 32))
def test_character_orthogonality(p, r):
    F = construct_field(p, r)
    M = character_matrix(F)
    assert np.allclose(M @ M.conj().T, F.q * np.eye(F.q))


@pytest.mark.parametrize("p,r", oracles.prime_powers(2, 64))
def test_fft_matches_direct(p, r):
    F = construct_field(p, r)
    rng = np.random.default_rng(F.q)
    f = rng.standard_normal(F.q) + 1j * rng.standard_normal(F.q)
    fast = fourier_transform(F, f).values
    slow = fourier_transform(F, f, method="direct").values
    assert np.allclose(fast, slow, atol=1e-10)
    assert np.allclose(fourier_invert(fourier_transform(F, f)).values, f, atol=1e-10)
    assert np.allclose(fourier_invert(fourier_transform(F, f), method="direct").values, f, atol=1e-10)
    lhs, rhs, err = plancherel_check(F, f, rng.standard_normal(F.q))
    assert err < 1e-9


def test_transform_of_indicator_at_zero():
    F = construct_field(3, 3)
    A = [1, 5, 7, 20]
    spectrum = fourier_transform(F, indicator(F, A))
    assert spectrum[0] == pytest.approx(len(A))


def test_quadratic_gauss_sum_modulus():
    F = construct_field(7)
    P = poly_from_ints(F, [0, 0, 1])
    for label in range(1, 7):
        assert abs(weil_sum(P, character(F, label))) == pytest.approx(math.sqrt(7))


@pytest.mark.parametrize("p,r", [(5, 1), (7, 1), (2, 3), (3, 2), (13, 1), (2, 4)])
def test_weil_sums_match_oracle(p, r):
    F = construct_field(p, r)
    rng = np.random.default_rng(p + r)
    coeffs = [int(c) for c in rng.integers(0, F.q, size=4)] + [1]
    P = poly_from_ints(F, coeffs)
    allsums = weil_sums_all(P)
    for label in range(F.q):
        ref = oracles.weil_sum(p, r, coeffs, label)
        assert cmath.isclose(allsums[label], ref, abs_tol=1e-9)
        assert cmath.isclose(weil_sum(P, character(F, label)), ref, abs_tol=1e-9)


def test_weil_check_errors_and_fields():
    F = construct_field(11)
    P = poly_from_ints(F, [1, 2, 0, 1])
    with pytest.raises(PrincipalCharacter):
        verify_weil(P, character(F, 0))
    chk = verify_weil(P, character(F, 3))
    assert chk.applies and chk.slack >= 0 and chk.bound == pytest.approx(2 * math.sqrt(11))


@pytest.mark.parametrize("p,r", [(5, 1), (7, 1), (3, 2), (2, 3), (11, 1)])
def test_averaging_matches_oracle(p, r):
    F = construct_field(p, r)
    rng = np.random.default_rng(7 * p + r)
    for _ in range(10):
        A = np.flatnonzero(rng.random(F.q) < 0.5).tolist()
        B = np.flatnonzero(rng.random(F.q) < 0.4).tolist()
        coeffs = [int(c) for c in rng.integers(0, F.q, size=3)] + [int(rng.integers(1, F.q))]
        P = poly_from_ints(F, coeffs)
        dev = averaged_intersection_deviation(A, B, P)
        assert dev == oracles.averaged_deviation(p, r, A, B, coeffs)
        # the same quantity through characters
        terms = averaging_terms(A, B, P)
        assert abs(fourier_deviation(A, B, P) - float(terms.signed_deviation)) < 1e-12


def test_averaging_terms_identities():
    F = construct_field(13)
    A, B = [0, 1, 2, 5], [3, 4, 9]
    t = averaging_terms(A, B, DensePolynomial.monomial(F(2), 3))
    assert t.nonzero_average == t.full_average - t.overlap / 13
    assert t.main_term == Fraction(12, 169)
    assert sum(t.hit_counts) == t.full_average * 169


def test_centered_shift_averages_to_zero():
    F = construct_field(3, 2)
    A = [0, 2, 4, 7]
    a = CenteredShift.of(F, A, 3)
    assert a.mu == Fraction(4, 9)
    assert a.total() == 0
    assert all(shift_average(F, A, x) == 0 for x in range(9))


def test_error_functions():
    assert elementary_base(5, 3) == Fraction(25 - 16, 25)
    assert error_fn_elementary(5, 3) == pytest.approx((9 / 25) ** 0.25)
    assert error_fn_fourier(16, 5) == 1.0
    for q in (2, 3, 4, 7, 9, 64, 1024, 4099):
        assert error_fn_elementary(q, 2) == error_fn_fourier(q, 2)
    with pytest.raises(DegreeTooSmall):
        elementary_base(5, 1)


def test_lemma_checks_and_errors():
    F = construct_field(11)
    A, B = list(range(6)), [1, 3, 8]
    chk = verify_lemma8(F, A, B, F(2), 3)
    assert chk.holds and chk.slack >= 0
    with pytest.raises(DegreeOutOfRange):
        verify_lemma8(F, A, B, F(2), 11)
    with pytest.raises(DegreeNotCoprime):
        verify_lemma12(construct_field(2, 3), [1], [2], poly_from_ints(construct_field(2, 3), [0, 0, 1]))
    assert verify_lemma12(F, A, B, poly_from_ints(F, [1, 4, 0, 2])).holds


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(5, 1), (7, 1), (13, 1), (3, 3), (2, 5), (31, 1)]), st.data())
def test_lemma12_property(pr, data):
    F = construct_field(*pr)
    d = data.draw(st.integers(1, 6).filter(lambda k: math.gcd(k, F.q) == 1))
    A = data.draw(st.sets(st.integers(0, F.q - 1)))
    B = data.draw(st.sets(st.integers(0, F.q - 1)))
    coeffs = [data.draw(st.integers(0, F.q - 1)) for _ in range(d)] + [data.draw(st.integers(1, F.q - 1))]
    chk = verify_lemma12(F, sorted(A), sorted(B), poly_from_ints(F, coeffs))
    assert chk.holds


def test_char_divides_counterexample():
    # x^p + x is additive; when it has a kernel, A = B = its image (a subgroup
    # of index p) pins the deviation at 1/p - 1/p^2 however large q grows
    for p, r in [(2, 2), (2, 6), (3, 2), (3, 4), (5, 2), (2, 10), (3, 6), (5, 4)]:
        F = construct_field(p, r)
        V = np.unique(poly_from_ints(F, [0, 1] + [0] * (p - 2) + [1]).values()).tolist()
        assert len(V) == F.q // p
        dev = counterexample_char_divides(F, V, V)
        assert dev == Fraction(1, p) - Fraction(1, p * p)
        if r > 4:
            # (p-1)/sqrt(q) equals the deviation at r = 4 and is smaller beyond
            assert float(dev) > error_fn_fourier(F.q, p)


def test_char_divides_permutation_case():
    # odd p, odd r: -1 is not a (p-1)-th power, x^p + x permutes F_q, deviation vanishes
    F = construct_field(5, 3)
    rng = np.random.default_rng(3)
    for _ in range(5):
        A = np.flatnonzero(rng.random(F.q) < 0.3).tolist()
        B = np.flatnonzero(rng.random(F.q) < 0.6).tolist()
        assert counterexample_char_divides(F, A, B) == 0
    assert counterexample_char_divides(F, list(range(F.q)), [1, 2]) == 0
