"""Sweeps over prime powers: coverage, bound checks and exceptional fields.

Records are emitted in a fixed order (q, then d, then check) and serialized
as one JSON object per line, so identical configs give identical files.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from sympy import primerange

from . import harmonic
from .diagonal import small_bound_table, small_threshold_predicate
from .errors import BoundViolation, FieldMismatch, NoWitness, RangeError, ZeroCoefficient
from .field import CEILING, FieldElement, FiniteField, construct_field
from .polynomial import DensePolynomial
from .power_sums import gcd_reduce_exponent, image_codes, witness_arrays

CHECKS = ("coverage", "small-bound", "weil", "lemma8", "lemma12")
COEFFICIENT_MODES = ("unit", "all-pairs", "sampled-k")
# records emitted by single-shot CLI commands rather than sweeps
RECORD_CHECKS = CHECKS + ("witness", "count", "fourier-selftest")
OUTCOMES = ("pass", "fail", "exceptional")
RECORD_FIELDS = ("q", "p", "r", "d", "a", "b", "check", "outcome", "payload", "wall_time_micros")
WEIL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    q_min: int = 2
    q_max: int = 64
    d_list: tuple = (2, 3)
    coefficient_mode: str = "unit"
    checks: tuple = ("coverage",)
    seed: Optional[int] = None
    output_path: Optional[str] = None
    sample_k: int = 32
    all_pairs_cap: int = 64
    certificate: bool = True
    weil_samples: int = 200
    lemma_samples: int = 100
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "d_list", tuple(int(d) for d in self.d_list))
        object.__setattr__(self, "checks", tuple(self.checks))
        if self.q_min < 2:
            raise RangeError("q_min must be >= 2")
        if self.q_max < self.q_min or self.q_max > CEILING:
            raise RangeError(f"need q_min <= q_max <= {CEILING}")
        if any(d < 1 for d in self.d_list):
            raise ValueError("exponents must be >= 1")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; choose from {CHECKS}")
        if self.coefficient_mode not in COEFFICIENT_MODES:
            raise ValueError(f"coefficient mode must be one of {COEFFICIENT_MODES}")
        if self.coefficient_mode == "sampled-k" and self.seed is None:
            raise ValueError("sampled-k mode requires a seed")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class SweepRecord:
    q: int
    p: int
    r: int
    d: int
    a: Optional[int]
    b: Optional[int]
    check: str
    outcome: str
    payload: dict = dc_field(default_factory=dict)
    wall_time_micros: Optional[int] = None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"bad outcome {self.outcome!r}")
        if self.outcome == "exceptional" and self.check != "coverage":
            raise ValueError("only coverage records can be exceptional")

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in RECORD_FIELDS}
        out["payload"] = _canonical(self.payload)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> SweepRecord:
        missing = [k for k in RECORD_FIELDS if k not in data]
        if missing:
            raise ValueError(f"record missing fields {missing}")
        return cls(**{k: data[k] for k in RECORD_FIELDS})


def _canonical(obj):
    if isinstance(obj, dict):
        return {str(k): _canonical(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def validate_record(data: dict) -> None:
    """Raise ValueError unless ``data`` matches the record schema."""
    if set(data) != set(RECORD_FIELDS):
        raise ValueError(f"record keys {sorted(data)} != {sorted(RECORD_FIELDS)}")
    for k in ("q", "p", "r", "d"):
        if not isinstance(data[k], int):
            raise ValueError(f"{k} must be an integer")
    for k in ("a", "b"):
        if data[k] is not None and not isinstance(data[k], int):
            raise ValueError(f"{k} must be an integer or null")
    if data["check"] not in RECORD_CHECKS:
        raise ValueError(f"unknown check {data['check']!r}")
    if data["outcome"] not in OUTCOMES:
        raise ValueError(f"unknown outcome {data['outcome']!r}")
    if data["outcome"] == "exceptional" and data["check"] not in ("coverage", "witness"):
        raise ValueError("only coverage and witness records can be exceptional")
    if not isinstance(data["payload"], dict):
        raise ValueError("payload must be an object")
    if data["wall_time_micros"] is not None and not isinstance(data["wall_time_micros"], int):
        raise ValueError("wall_time_micros must be an integer or null")
    if data["p"] ** data["r"] != data["q"]:
        raise ValueError("q != p^r")


# --- prime powers ------------------------------------------------------------


def enumerate_prime_powers(q_min: int, q_max: int) -> list[tuple[int, int]]:
    """All (p, r) with q_min <= p^r <= q_max, ascending by q."""
    if q_min < 2 or q_max < q_min or q_max > CEILING:
        raise RangeError(f"need 2 <= q_min <= q_max <= {CEILING}")
    out = []
    for p in primerange(2, q_max + 1):
        q, r = p, 1
        while q <= q_max:
            if q >= q_min:
                out.append((q, int(p), r))
            q *= p
            r += 1
    return [(p, r) for _, p, r in sorted(out)]


# --- individual checks -------------------------------------------------------


def _coefficient_pairs(field: FiniteField, config: SweepConfig, rng: np.random.Generator):
    q = field.q
    if config.coefficient_mode == "all-pairs" and q <= config.all_pairs_cap:
        return [(a, b) for a in range(1, q) for b in range(1, q)]
    if config.coefficient_mode == "sampled-k":
        pairs = {(1, 1)}
        total = (q - 1) ** 2
        target = min(config.sample_k, total)
        while len(pairs) < target:
            a, b = rng.integers(1, q, size=2)
            pairs.add((int(a), int(b)))
        return sorted(pairs)
    return [(1, 1)]


def _coverage_payload(field: FiniteField, d: int, a: int, b: int) -> tuple[str, dict]:
    wx, _ = witness_arrays(field, d, a, b)
    missing = np.flatnonzero(wx < 0).tolist()
    delta = gcd_reduce_exponent(field, d)
    threshold = small_threshold_predicate(field.q, d)
    payload = {
        "covered": not missing,
        "unrepresented": missing,
        "delta": delta,
        "image_size": 1 + (field.q - 1) // delta,
        "threshold": threshold,
        "certified": False,
    }
    if not missing:
        return "pass", payload
    # Small's theorem (unit coefficients) and the square case admit no exceptions
    if (threshold and a == 1 and b == 1) or d == 2 or delta == 1:
        return "fail", payload
    return "exceptional", payload


def coverage_records(field: FiniteField, d: int, config: SweepConfig, rng) -> list[SweepRecord]:
    out = []
    for a, b in _coefficient_pairs(field, config, rng):
        t0 = time.perf_counter_ns()
        if config.certificate and a == 1 and b == 1 and small_threshold_predicate(field.q, d):
            delta = gcd_reduce_exponent(field, d)
            outcome, payload = "pass", {
                "covered": True,
                "unrepresented": [],
                "delta": delta,
                "image_size": 1 + (field.q - 1) // delta,
                "threshold": True,
                "certified": True,
            }
        else:
            outcome, payload = _coverage_payload(field, d, a, b)
        out.append(_record(field, d, a, b, "coverage", outcome, payload, t0, config))
    return out


def small_bound_records(field: FiniteField, d: int, config: SweepConfig, rng) -> list[SweepRecord]:
    t0 = time.perf_counter_ns()
    rows = small_bound_table(field, d)
    worst = min(rows, key=lambda s: (s.bound_slack, s.instance.rhs.value))
    ok = all(s.within_bound for s in rows)
    payload = {
        "delta": worst.delta,
        "bound": worst.bound,
        "min_slack": worst.bound_slack,
        "worst_rhs": worst.instance.rhs.value,
        "worst_count": worst.count,
        "max_abs_deviation": max(abs(s.count - field.q) for s in rows),
        "rhs_checked": len(rows),
    }
    return [_record(field, d, 1, 1, "small-bound", "pass" if ok else "fail", payload, t0, config)]


def random_polynomial(field: FiniteField, d: int, rng: np.random.Generator) -> DensePolynomial:
    """Degree exactly d, uniform lower coefficients, nonzero leading coefficient."""
    coeffs = [int(c) for c in rng.integers(0, field.q, size=d)] + [int(rng.integers(1, field.q))]
    return DensePolynomial(field, coeffs)


def random_subset(field: FiniteField, rng: np.random.Generator) -> np.ndarray:
    density = rng.random()
    return np.flatnonzero(rng.random(field.q) < density)


def weil_records(field: FiniteField, d: int, config: SweepConfig, rng) -> list[SweepRecord]:
    q = field.q
    if not (1 <= d < q and math.gcd(d, q) == 1):
        return []
    t0 = time.perf_counter_ns()
    bound = (d - 1) * math.sqrt(q)
    worst_mod, worst_poly, violations = -1.0, None, 0
    for _ in range(config.weil_samples):
        P = random_polynomial(field, d, rng)
        mods = np.abs(harmonic.weil_sums_all(P)[1:])
        m = float(mods.max()) if mods.size else 0.0
        if m > bound + WEIL_TOLERANCE:
            violations += 1
        if m > worst_mod:
            worst_mod, worst_poly = m, list(P.coeffs)
    payload = {
        "polynomials": config.weil_samples,
        "characters": q - 1,
        "bound": bound,
        "max_modulus": worst_mod,
        "min_slack": bound - worst_mod,
        "worst_poly": worst_poly,
        "violations": violations,
    }
    outcome = "fail" if violations else "pass"
    return [_record(field, d, None, None, "weil", outcome, payload, t0, config)]


def _lemma_payload(checks, samples, worst_case) -> tuple[str, dict]:
    worst = min(checks, key=lambda c: c.slack)
    violations = sum(not c.holds for c in checks)
    payload = {
        "samples": samples,
        "bound": worst.bound,
        "max_deviation": max(c.deviation for c in checks),
        "min_slack": worst.slack,
        "violations": violations,
        "worst_case": worst_case[checks.index(worst)],
    }
    return ("fail" if violations else "pass"), payload


def lemma8_records(field: FiniteField, d: int, config: SweepConfig, rng) -> list[SweepRecord]:
    if not 1 < d < field.p:
        return []
    t0 = time.perf_counter_ns()
    checks, cases = [], []
    for _ in range(config.lemma_samples):
        A, B = random_subset(field, rng), random_subset(field, rng)
        c = field(int(rng.integers(1, field.q)))
        checks.append(harmonic.verify_lemma8(field, A.tolist(), B.tolist(), c, d))
        cases.append({"A": A.tolist(), "B": B.tolist(), "c": c.value})
    outcome, payload = _lemma_payload(checks, config.lemma_samples, cases)
    return [_record(field, d, None, None, "lemma8", outcome, payload, t0, config)]


def lemma12_records(field: FiniteField, d: int, config: SweepConfig, rng) -> list[SweepRecord]:
    if math.gcd(d, field.q) != 1:
        return []
    t0 = time.perf_counter_ns()
    checks, cases = [], []
    for _ in range(config.lemma_samples):
        A, B = random_subset(field, rng), random_subset(field, rng)
        P = random_polynomial(field, d, rng)
        checks.append(harmonic.verify_lemma12(field, A.tolist(), B.tolist(), P))
        cases.append({"A": A.tolist(), "B": B.tolist(), "poly": list(P.coeffs)})
    outcome, payload = _lemma_payload(checks, config.lemma_samples, cases)
    return [_record(field, d, None, None, "lemma12", outcome, payload, t0, config)]


CHECK_RUNNERS = {
    "coverage": coverage_records,
    "small-bound": small_bound_records,
    "weil": weil_records,
    "lemma8": lemma8_records,
    "lemma12": lemma12_records,
}


def _record(field, d, a, b, check, outcome, payload, t0, config) -> SweepRecord:
    micros = (time.perf_counter_ns() - t0) // 1000 if config.timing else None
    return SweepRecord(field.q, field.p, field.r, d, a, b, check, outcome, payload, micros)


def _run_task(task) -> list[SweepRecord]:
    p, r, d, check, config = task
    field = construct_field(p, r)
    seed = 0 if config.seed is None else config.seed
    rng = np.random.default_rng([seed, field.q, d, CHECKS.index(check)])
    return CHECK_RUNNERS[check](field, d, config, rng)


# --- sweep driver ------------------------------------------------------------


def _tasks(config: SweepConfig):
    for p, r in enumerate_prime_powers(config.q_min, config.q_max):
        for d in config.d_list:
            for check in config.checks:
                yield (p, r, d, check, config)


def iter_sweep(config: SweepConfig) -> Iterator[SweepRecord]:
    """Records in deterministic order; raises BoundViolation after a fail record."""
    tasks = list(_tasks(config))
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            batches = pool.map(_run_task, tasks)
            yield from _drain(batches)
    else:
        yield from _drain(map(_run_task, tasks))


def _drain(batches) -> Iterator[SweepRecord]:
    for batch in batches:
        for rec in batch:
            yield rec
            if rec.outcome == "fail":
                raise BoundViolation(
                    f"{rec.check} failed at q={rec.q}, d={rec.d}, a={rec.a}, b={rec.b}", rec
                )


def summarize(records) -> list[dict]:
    groups: dict = {}
    for rec in records:
        g = groups.setdefault(
            (rec.d, rec.check),
            {"d": rec.d, "check": rec.check, "pass": 0, "fail": 0, "exceptional": 0, "min_slack": None,
             "exceptional_q": []},
        )
        g[rec.outcome] += 1
        if rec.outcome == "exceptional" and rec.q not in g["exceptional_q"]:
            g["exceptional_q"].append(rec.q)
        slack = rec.payload.get("min_slack")
        if slack is not None and (g["min_slack"] is None or slack < g["min_slack"]):
            g["min_slack"] = slack
    return [groups[k] for k in sorted(groups, key=lambda k: (k[0], CHECKS.index(k[1])))]


def summary_path(output_path: str | Path) -> Path:
    path = Path(output_path)
    return path.with_name(path.stem + ".summary.json")


@dataclass
class SweepResult:
    records: list
    summary: list
    violation: Optional[BoundViolation] = None


def run_sweep(config: SweepConfig) -> SweepResult:
    """Run every check, persist records and summary, and re-raise any violation.

    On a violation the records up to and including the failing one are still
    written, so the output file doubles as a reproducer.
    """
    records: list = []
    violation = None
    try:
        for rec in iter_sweep(config):
            records.append(rec)
    except BoundViolation as exc:
        violation = exc
    result = SweepResult(records, summarize(records), violation)
    if config.output_path:
        write_records(config.output_path, result)
    if violation is not None:
        raise violation
    return result


def write_records(output_path: str | Path, result: SweepResult) -> None:
    path = Path(output_path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in result.records:
            fh.write(rec.to_json() + "\n")
    summary_path(path).write_text(
        json.dumps(_canonical({"groups": result.summary}), indent=2) + "\n", encoding="utf-8"
    )


# --- exceptional fields ------------------------------------------------------


def exceptional_scan(d: int, q_max: int, certificate: bool = True) -> Iterator[tuple[int, str]]:
    """(q, status) per prime power q <= q_max; status is exceptional/covered/certified."""
    if q_max < 2:
        return
    for p, r in enumerate_prime_powers(2, q_max):
        q = p**r
        if certificate and small_threshold_predicate(q, d):
            yield q, "certified"
            continue
        field = construct_field(p, r)
        wx, _ = witness_arrays(field, d, 1, 1)
        yield q, ("exceptional" if np.any(wx < 0) else "covered")


def exceptional_field_search(d: int, q_max: int, certificate: bool = True) -> list[int]:
    """Prime powers q <= q_max where not every element is a sum of two d-th powers."""
    return [q for q, status in exceptional_scan(d, q_max, certificate) if status == "exceptional"]


# --- witnesses through the averaging argument ----------------------------------


@dataclass(frozen=True)
class AveragingWitness:
    g: FieldElement
    x: FieldElement
    y: FieldElement
    method: str  # "averaging" or "direct"
    claim_holds: bool


def averaging_claim(field: FiniteField, d: int, A: np.ndarray, B: np.ndarray) -> bool:
    """mu(A) mu(B) - (1/q) mu(A cap B) > E(q, d) for an applicable error function."""
    q = field.q
    overlap = len(np.intersect1d(A, B))
    gap = Fraction(len(A) * len(B), q * q) - Fraction(overlap, q * q)
    if gap <= 0:
        return False
    if math.gcd(d, q) == 1:
        return not harmonic._below_fourier(gap, q, d)
    if 1 < d < field.p:
        return not harmonic._below_elementary(gap, q, d)
    return False


def witness_by_averaging(
    field: FiniteField,
    d: int,
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    mode: str = "auto",
) -> AveragingWitness:
    """Find g != 0 with A cap (B + c g^d) nonempty and divide through by g.

    A = {a x^d}, B = {-b y^d}.  In ``auto`` mode the scan runs only when the
    averaging claim certifies T > 0; otherwise the least direct
    representation is returned with g = 1.
    """
    for x in (a, b, c):
        if x.field != field:
            raise FieldMismatch("element from another field")
    if a.value == 0 or b.value == 0 or c.value == 0:
        raise ZeroCoefficient("a, b, c must be nonzero")
    if mode not in ("auto", "averaging", "direct"):
        raise ValueError(f"unknown mode {mode!r}")
    img = image_codes(field, d)
    A = np.unique(field.mul_codes(a.value, img))
    B = np.unique(field.neg_codes(field.mul_codes(b.value, img)))
    claim = averaging_claim(field, d, A, B)
    use_averaging = mode == "averaging" or (mode == "auto" and claim)
    pre = field.least_preimages(d)
    inv_b = field._inv_scalar(b.value)
    if use_averaging:
        P = DensePolynomial.monomial(c, d)
        terms = harmonic.averaging_terms(A.tolist(), B.tolist(), P)
        g = terms.least_nonzero_hit()
        if g is None:
            raise NoWitness(f"T = 0: {c} is not a*x^{d} + b*y^{d}")
        shift = field._mul_scalar(c.value, field._pow_scalar(g, d))
        xs = np.arange(field.q, dtype=np.int64)
        ax = field.mul_codes(a.value, field.pow_codes(xs, d))
        # a x1^d = -b x2^d + c g^d  <=>  x2^d = (c g^d - a x1^d) / b
        x2_pow = field.mul_codes(field.sub_codes(shift, ax), inv_b)
        x2 = pre[x2_pow]
        x1 = int(np.flatnonzero(x2 >= 0)[0])
        gi = field._inv_scalar(g)
        x = field(field._mul_scalar(x1, gi))
        y = field(field._mul_scalar(int(x2[x1]), gi))
        method, g_elem = "averaging", field(g)
    else:
        wx, wy = witness_arrays(field, d, a.value, b.value)
        if wx[c.value] < 0:
            raise NoWitness(f"{c} is not a*x^{d} + b*y^{d}")
        x, y, g_elem, method = field(int(wx[c.value])), field(int(wy[c.value])), field.one, "direct"
    if a * x**d + b * y**d != c:
        raise AssertionError("averaging witness failed verification")
    return AveragingWitness(g_elem, x, y, method, claim)
