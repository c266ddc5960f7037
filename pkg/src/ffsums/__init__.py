"""Finite fields up to 2^20, sums of two d-th powers, and the bounds around them."""

from .errors import BoundViolation, FiniteFieldError
from .field import (
    FieldElement,
    FiniteField,
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
from .polynomial import DensePolynomial, difference_polynomial
from .power_sums import (
    CoverageReport,
    PowerImage,
    cauchy_two_squares,
    coverage_report,
    division_trick,
    power_image,
    sum_of_two_powers_set,
    three_term_diagonal_witness,
    weber_representation,
    weber_two_squares,
)
from .diagonal import DiagonalInstance, SolutionCount, count_solutions, verify_small_bound
from .harmonic import (
    AdditiveCharacter,
    averaged_intersection_deviation,
    character,
    error_fn_elementary,
    error_fn_fourier,
    fourier_invert,
    fourier_transform,
    verify_lemma8,
    verify_lemma12,
    verify_weil,
    weil_sum,
)
from .survey import SweepConfig, SweepRecord, exceptional_field_search, run_sweep, witness_by_averaging

__version__ = "0.1.0"
