"""Fourier analysis on (F_q, +), Weil sums, and the two averaging lemmas.

Characters are realized through the absolute trace,
chi_a(x) = exp(2 pi i Tr(a x) / p), which indexes the character group by
field elements.  Since Tr(a x) = (T a) . x for the symmetric matrix
T_ij = Tr(t^(i+j)), the transform over all labels is an ordinary
multidimensional DFT on (Z/p)^r followed by the index permutation a -> T a.

Measures are exact :class:`fractions.Fraction` values; complex arithmetic
only appears where roots of unity force it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Union

import mpmath
import numpy as np

from .errors import (
    DegreeNotCoprime,
    DegreeOutOfRange,
    DegreeTooSmall,
    FieldMismatch,
    PrincipalCharacter,
    ZeroCoefficient,
)
from .field import FieldElement, FiniteField, codes_of
from .polynomial import DensePolynomial

FieldFunctionLike = Union[Callable[[FieldElement], complex], np.ndarray, list, tuple]


def _roots_of_unity(p: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(p) / p)


@dataclass(frozen=True)
class AdditiveCharacter:
    field: FiniteField
    label: FieldElement

    def __post_init__(self):
        if self.label.field != self.field:
            raise FieldMismatch("label from another field")

    @property
    def is_principal(self) -> bool:
        return self.label.value == 0

    def values(self) -> np.ndarray:
        """chi(x) for every code x."""
        f = self.field
        tr = f.trace_codes(f.mul_codes(self.label.value, np.arange(f.q)))
        return _roots_of_unity(f.p)[tr]

    def __call__(self, x: FieldElement) -> complex:
        return character_value(self, x)


def character(field: FiniteField, label: int | FieldElement) -> AdditiveCharacter:
    if not isinstance(label, FieldElement):
        label = field(label)
    return AdditiveCharacter(field, label)


def character_value(chi: AdditiveCharacter, x: FieldElement) -> complex:
    if x.field != chi.field:
        raise FieldMismatch("argument from another field")
    f = chi.field
    k = int(f.trace_table[f._mul_scalar(chi.label.value, x.value)])
    return complex(np.exp(2j * np.pi * k / f.p))


@dataclass(frozen=True)
class SpectrumFunction:
    """Complex values indexed by character label code."""

    field: FiniteField
    values: np.ndarray

    def __getitem__(self, label: int | FieldElement) -> complex:
        return complex(self.values[int(label)])


@dataclass(frozen=True)
class FieldFunction:
    """A function F_q -> C stored as its value table in code order."""

    field: FiniteField
    values: np.ndarray

    def __call__(self, x: FieldElement | int) -> complex:
        return complex(self.values[int(x)])


def as_values(field: FiniteField, f: FieldFunctionLike) -> np.ndarray:
    if isinstance(f, (FieldFunction, SpectrumFunction)):
        return np.asarray(f.values, dtype=complex)
    if callable(f):
        return np.array([complex(f(x)) for x in field.elements()], dtype=complex)
    arr = np.asarray(f, dtype=complex)
    if arr.shape != (field.q,):
        raise ValueError(f"expected {field.q} values, got shape {arr.shape}")
    return arr


def indicator(field: FiniteField, items: Iterable[FieldElement | int]) -> np.ndarray:
    mask = np.zeros(field.q)
    mask[codes_of(field, items)] = 1.0
    return mask


_DUAL_CACHE: dict = {}


def dual_index(field: FiniteField) -> np.ndarray:
    """Code of T a for every label a, where Tr(a x) = (T a) . x."""
    key = (field.p, field.r, field.modulus)
    if key not in _DUAL_CACHE:
        p, r = field.p, field.r
        pw = [p**i for i in range(r)]
        gram = [[int(field.trace_table[field._mul_scalar(pw[i], pw[j])]) for j in range(r)] for i in range(r)]
        codes = np.arange(field.q, dtype=np.int64)
        digits = [(codes // w) % p for w in pw]
        out = np.zeros(field.q, dtype=np.int64)
        for i in range(r):
            k_i = sum(gram[i][j] * digits[j] for j in range(r)) % p
            out += k_i * pw[i]
        out.setflags(write=False)
        _DUAL_CACHE[key] = out
    return _DUAL_CACHE[key]


def _grid(field: FiniteField, v: np.ndarray) -> np.ndarray:
    return v.reshape((field.p,) * field.r)


def fourier_transform(field: FiniteField, f: FieldFunctionLike, method: str = "fft") -> SpectrumFunction:
    """f^(chi_a) = sum_g f(g) chi_a(g) for every label a."""
    v = as_values(field, f)
    if method == "direct":
        return SpectrumFunction(field, character_matrix(field) @ v)
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    g = (np.fft.ifftn(_grid(field, v)) * field.q).ravel()
    return SpectrumFunction(field, g[dual_index(field)])


def fourier_invert(spectrum: SpectrumFunction, method: str = "fft") -> FieldFunction:
    """f(a) = (1/q) sum_chi f^(chi) chi(-a)."""
    field = spectrum.field
    s = np.asarray(spectrum.values, dtype=complex)
    if method == "direct":
        # chi_b(-a) = conj(chi_b(a)); the character matrix is symmetric
        return FieldFunction(field, np.conj(character_matrix(field)) @ s / field.q)
    g = np.fft.fftn(_grid(field, s)).ravel()
    return FieldFunction(field, g[dual_index(field)] / field.q)


def character_matrix(field: FiniteField) -> np.ndarray:
    """M[a, x] = chi_a(x); O(q^2) memory, meant for small fields and checks."""
    codes = np.arange(field.q)
    tr = field.trace_codes(field.mul_codes(codes[:, None], codes[None, :]))
    return _roots_of_unity(field.p)[tr]


def inner_product(field: FiniteField, f1: FieldFunctionLike, f2: FieldFunctionLike) -> complex:
    """<f1, f2> = (1/q) sum f1 conj(f2)."""
    return complex(np.vdot(as_values(field, f2), as_values(field, f1)) / field.q)


def plancherel_check(field: FiniteField, f1: FieldFunctionLike, f2: FieldFunctionLike):
    """(<f1^, f2^>, q <f1, f2>, |difference|)."""
    s1 = fourier_transform(field, f1).values
    s2 = fourier_transform(field, f2).values
    lhs = complex(np.vdot(s2, s1) / field.q)
    rhs = field.q * inner_product(field, f1, f2)
    return lhs, rhs, abs(lhs - rhs)


def fourier_selftest(field: FiniteField, seed: int = 0, samples: int = 100) -> dict:
    """Worst inversion, Plancherel and FFT-vs-direct errors over seeded random functions."""
    rng = np.random.default_rng([seed, field.q])
    direct = character_matrix(field) if field.q <= 4096 else None
    worst_round = worst_planch = worst_abs = worst_direct = 0.0
    for _ in range(samples):
        f1 = rng.standard_normal(field.q) + 1j * rng.standard_normal(field.q)
        f2 = rng.standard_normal(field.q) + 1j * rng.standard_normal(field.q)
        spectrum = fourier_transform(field, f1)
        back = fourier_invert(spectrum).values
        worst_round = max(worst_round, float(np.abs(back - f1).max()))
        lhs, _, err = plancherel_check(field, f1, f2)
        worst_planch = max(worst_planch, err / max(1.0, abs(lhs)))
        worst_abs = max(worst_abs, err)
        if direct is not None:
            worst_direct = max(worst_direct, float(np.abs(direct @ f1 - spectrum.values).max()))
    return {
        "max_roundtrip_error": worst_round,
        "max_plancherel_rel_error": worst_planch,
        "max_plancherel_abs_error": worst_abs,
        "max_fft_vs_direct": worst_direct,
    }


# --- Weil sums ----------------------------------------------------------------


def weil_sum(P: DensePolynomial, chi: AdditiveCharacter) -> complex:
    """sum_g chi(P(g))."""
    if P.field != chi.field:
        raise FieldMismatch("polynomial and character over different fields")
    f = P.field
    tr = f.trace_codes(f.mul_codes(chi.label.value, P.values()))
    counts = np.bincount(tr, minlength=f.p)
    return complex(counts @ _roots_of_unity(f.p))


def weil_sums_all(P: DensePolynomial) -> np.ndarray:
    """sum_g chi_a(P(g)) for every label a, via the transform of P's value counts."""
    f = P.field
    counts = np.bincount(P.values(), minlength=f.q).astype(float)
    return fourier_transform(f, counts).values


def weil_bound_applies(P: DensePolynomial) -> bool:
    d, q = P.degree, P.field.q
    return isinstance(d, int) and 1 <= d < q and math.gcd(d, q) == 1


class WeilCheck(NamedTuple):
    value: complex
    modulus: float
    bound: float
    slack: float
    applies: bool


def verify_weil(P: DensePolynomial, chi: AdditiveCharacter) -> WeilCheck:
    """Compare |sum chi(P(g))| with (d - 1) sqrt(q)."""
    if chi.is_principal:
        raise PrincipalCharacter("the bound needs a nontrivial character")
    s = weil_sum(P, chi)
    d = P.degree if isinstance(P.degree, int) else 0
    bound = (d - 1) * math.sqrt(P.field.q)
    return WeilCheck(s, abs(s), bound, bound - abs(s), weil_bound_applies(P))


# --- averaging over polynomial shifts ---------------------------------------


def intersection_counts(field: FiniteField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """counts[v] = |A cap (B + v)|."""
    mask = np.zeros(field.q, dtype=np.int64)
    mask[A] = 1
    codes = np.arange(field.q, dtype=np.int64)
    out = np.zeros(field.q, dtype=np.int64)
    for y in B.tolist():
        out += mask[field.add_codes(codes, y)]
    return out


@dataclass(frozen=True)
class AveragingTerms:
    """S, T and the main term for (1/q) sum_g mu(A cap (B + P(g)))."""

    full_average: Fraction  # S
    nonzero_average: Fraction  # T = S - (1/q) mu(A cap B)
    main_term: Fraction  # mu(A) mu(B)
    overlap: Fraction  # mu(A cap B)
    hit_counts: tuple  # |A cap (B + P(g))| per code g

    @property
    def deviation(self) -> Fraction:
        return abs(self.full_average - self.main_term)

    @property
    def signed_deviation(self) -> Fraction:
        return self.full_average - self.main_term

    def least_nonzero_hit(self) -> int | None:
        """Least g != 0 with A cap (B + P(g)) nonempty."""
        for g, n in enumerate(self.hit_counts):
            if g and n:
                return g
        return None


def _poly_field(P: DensePolynomial, A, B):
    f = P.field
    return f, codes_of(f, A), codes_of(f, B)


def averaging_terms(A, B, P: DensePolynomial) -> AveragingTerms:
    f, a, b = _poly_field(P, A, B)
    q = f.q
    counts = intersection_counts(f, a, b)
    hits = counts[P.values()]
    total = int(hits.sum())
    overlap = Fraction(int(counts[0]), q)
    full = Fraction(total, q * q)
    return AveragingTerms(
        full_average=full,
        nonzero_average=full - overlap / q,
        main_term=Fraction(len(a) * len(b), q * q),
        overlap=overlap,
        hit_counts=tuple(hits.tolist()),
    )


def averaged_intersection_deviation(A, B, P: DensePolynomial) -> Fraction:
    """|(1/q) sum_g mu(A cap (B + P(g))) - mu(A) mu(B)|, exactly."""
    return averaging_terms(A, B, P).deviation


def fourier_deviation(A, B, P: DensePolynomial) -> complex:
    """(1/q^3) sum_{chi != chi_0} 1_A^(conj chi) 1_B^(chi) sum_g chi(P(g))."""
    f, a, b = _poly_field(P, A, B)
    fa = fourier_transform(f, indicator(f, a)).values
    fb = fourier_transform(f, indicator(f, b)).values
    w = weil_sums_all(P)
    labels = np.arange(1, f.q)
    terms = fa[f.neg_codes(labels)] * fb[labels] * w[labels]
    return complex(terms.sum() / f.q**3)


@dataclass(frozen=True)
class CenteredShift:
    """x -> 1_A(x + g) - mu(A) with exact rational values."""

    field: FiniteField
    A: frozenset
    g: int

    @classmethod
    def of(cls, field: FiniteField, A, g: FieldElement | int) -> CenteredShift:
        return cls(field, frozenset(codes_of(field, A).tolist()), int(g))

    @property
    def mu(self) -> Fraction:
        return Fraction(len(self.A), self.field.q)

    def __call__(self, x: FieldElement | int) -> Fraction:
        shifted = self.field._add_scalar(int(x), self.g)
        return (1 if shifted in self.A else 0) - self.mu

    def total(self) -> Fraction:
        return sum((self(x) for x in range(self.field.q)), Fraction(0))


def shift_average(field: FiniteField, A, x: FieldElement | int) -> Fraction:
    """(1/q) sum_g a_g(x); identically zero."""
    A = frozenset(codes_of(field, A).tolist())
    return sum((CenteredShift(field, A, g)(x) for g in range(field.q)), Fraction(0)) / field.q


# --- error functions ----------------------------------------------------------


def elementary_base(q: int, d: int) -> Fraction:
    """(q^(d-1) - (q-1)^(d-1)) / q^(d-1), the quantity raised to 2^-(d-1)."""
    if d < 2:
        raise DegreeTooSmall("needs d >= 2")
    return Fraction(q ** (d - 1) - (q - 1) ** (d - 1), q ** (d - 1))


def error_fn_elementary(q: int, d: int) -> float:
    # 2^-(d-1) power as d-1 nested square roots
    e = float(elementary_base(q, d))
    for _ in range(d - 1):
        e = math.sqrt(e)
    return e


def error_fn_fourier(q: int, d: int) -> float:
    if d < 1:
        raise ValueError("needs d >= 1")
    # sqrt((d-1)^2 / q) rounds identically to the elementary form at d = 2
    return math.sqrt((d - 1) ** 2 / q)


def _below_elementary(dev: Fraction, q: int, d: int) -> bool:
    """Exact test dev <= base^(2^-(d-1)).

    base <= 1, so base^(2^-k) <= base^(2^-(d-1)) for k <= d-1; a pass at a
    small k certifies the full inequality without huge powers.
    """
    if dev <= 0:
        return True
    base = elementary_base(q, d)
    m = d - 1
    k = min(m, 6)
    if dev ** (2**k) <= base:
        return True
    if k == m:
        return False
    with mpmath.workdps(80):
        e = mpmath.power(mpmath.mpf(base.numerator) / base.denominator, mpmath.mpf(2) ** (-m))
        return mpmath.mpf(dev.numerator) / dev.denominator <= e


def _below_fourier(dev: Fraction, q: int, d: int) -> bool:
    """Exact test dev <= (d-1)/sqrt(q), squared."""
    if dev <= 0:
        return True
    return d >= 1 and dev * dev * q <= (d - 1) ** 2


class LemmaCheck(NamedTuple):
    deviation: Fraction
    bound: float
    slack: float
    holds: bool


def verify_lemma8(field: FiniteField, A, B, c: FieldElement, d: int) -> LemmaCheck:
    """Deviation for P = c x^d against the differencing error function."""
    if not 1 < d < field.p:
        raise DegreeOutOfRange(f"needs 1 < d < char = {field.p}, got {d}")
    if c.field != field:
        raise FieldMismatch("coefficient from another field")
    if c.value == 0:
        raise ZeroCoefficient("c must be nonzero")
    dev = averaged_intersection_deviation(A, B, DensePolynomial.monomial(c, d))
    bound = error_fn_elementary(field.q, d)
    return LemmaCheck(dev, bound, bound - float(dev), _below_elementary(dev, field.q, d))


def verify_lemma12(field: FiniteField, A, B, P: DensePolynomial) -> LemmaCheck:
    """Deviation for any P of degree coprime to q against (d-1)/sqrt(q)."""
    if P.field != field:
        raise FieldMismatch("polynomial from another field")
    d = P.degree
    if not isinstance(d, int) or d < 1 or math.gcd(d, field.q) != 1:
        raise DegreeNotCoprime(f"degree {d} not coprime to q = {field.q}")
    dev = averaged_intersection_deviation(A, B, P)
    bound = error_fn_fourier(field.q, d)
    return LemmaCheck(dev, bound, bound - float(dev), _below_fourier(dev, field.q, d))


def counterexample_char_divides(field: FiniteField, A, B) -> Fraction:
    """Deviation for P(x) = x^p + x, where the degree is divisible by the characteristic."""
    P = DensePolynomial(field, [0, 1] + [0] * (field.p - 2) + [1])
    return averaged_intersection_deviation(A, B, P)
