"""Complex moments of L(1, chi_d) over prime discriminants.

Compares the empirical sums against the random-model prediction
(Li(x)/2) * E(L(1,X)^z), optionally with the secondary term attached to
a user-supplied exceptional modulus, and evaluates the smoothed
truncated Dirichlet series for individual discriminants.
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .arith import divisor_z_table, log_integral
from .classnum import ClassTable, character_table, _is_prime
from .errors import DomainError
from .randmodel import ModelConfig, expectation_product


@dataclass(frozen=True)
class ExceptionalModulus:
    """Hypothetical exceptional (q1, beta); supplied by the user, never detected."""

    q1: int
    beta: float

    def __post_init__(self):
        if self.q1 == 0:
            raise DomainError("q1 must be nonzero")
        from .randmodel import _squarefree_primes

        _squarefree_primes(abs(self.q1))
        if not 0.5 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (1/2, 1), got {self.beta}")


@dataclass(frozen=True)
class MomentRecord:
    x: int
    z: complex
    empirical: complex | None
    main_term: complex
    exceptional_term: complex | None
    ratio: complex | None


def empirical_moment(x: int, z: complex, table: ClassTable) -> complex:
    """Sum of (pi*h(-p)/sqrt(p))^z over sieved primes p <= x, p = 3 mod 4.

    Every term uses the positive real base pi*h/sqrt(p) (p = 3 included,
    keeping the z = 0 identity exact); complex powers take the real
    logarithm of the base, and the real/imaginary parts are accumulated
    with exactly rounded (compensated) summation in ascending-p order.
    """
    t = table.restrict(x)
    logb = np.log(math.pi) + np.log(t.h.astype(np.float64)) - 0.5 * np.log(t.p.astype(np.float64))
    terms = np.exp(complex(z) * logb)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def theorem2_range_ok(x: int, z: complex) -> bool:
    return z.real >= -1 and abs(z) <= math.sqrt(math.log(x)) / math.log(math.log(x)) ** 2


def theorem2_prediction(
    x: int,
    z: complex,
    exc: ExceptionalModulus | None,
    cfg: ModelConfig,
) -> MomentRecord:
    """Main term (Li(x)/2)*E(L^z), plus the exceptional secondary term when given.

    The secondary term is -sgn(q1) * (Li(x^beta)/2) * E(X(|q1|) L^z); no
    exceptional-zero detection is attempted, (q1, beta) are hypotheses.
    """
    z = complex(z)
    if not theorem2_range_ok(x, z):
        warnings.warn(
            f"z={z} outside the stated moment range at x={x}; prediction is extrapolated",
            stacklevel=2,
        )
    main = log_integral(x) / 2.0 * expectation_product(z, 1, cfg).value
    exceptional = None
    if exc is not None:
        twisted = expectation_product(z, abs(exc.q1), cfg).value
        sgn = 1.0 if exc.q1 > 0 else -1.0
        exceptional = -sgn * log_integral(x**exc.beta) / 2.0 * twisted
    return MomentRecord(
        x=x, z=z, empirical=None, main_term=main, exceptional_term=exceptional, ratio=None
    )


def smoothed_cutoff(y: float, z: complex) -> int:
    """Term cutoff for the smoothed series: 50*y*log(y)^2, shortened where
    the exponential damping already drives the tail below 1e-18."""
    full = math.ceil(50.0 * y * math.log(y) ** 2)
    k = math.floor(abs(z)) + 1
    certified = math.ceil(2.0 * y * (18.0 * math.log(10.0) + k * math.log(math.log(4.0 * y))))
    return min(full, certified)


def smoothed_series(d: int, z: complex, y: float) -> complex:
    """Smoothed truncated Dirichlet series sum d_z(n) chi_d(n) e^(-n/y) / n.

    Approximates L(1, chi_d)^z when y is large relative to |d|; the
    truncation follows the y*log(y)^2 tail split with a safety factor.
    """
    if y < 10:
        raise DomainError(f"smoothing scale y must be >= 10, got {y}")
    p = -d
    if d >= 0 or p % 4 != 3 or not _is_prime(p):
        raise DomainError(f"{d} is not a prime discriminant")
    z = complex(z)
    n_max = smoothed_cutoff(y, z)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    weights = np.exp(-n / y) / n
    chi = character_table(d, n_max)[1:]
    dz = divisor_z_table(z, n_max)[1:]
    terms = dz * (chi * weights)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def moment_sweep(
    x_list: list[int],
    z_list: list[complex],
    cfg: ModelConfig,
    table: ClassTable,
    exc: ExceptionalModulus | None = None,
) -> list[MomentRecord]:
    """One MomentRecord per (x, z) pair, in deterministic (x, z) order."""
    records = []
    for x in x_list:
        for z in z_list:
            pred = theorem2_prediction(x, z, exc, cfg)
            emp = empirical_moment(x, z, table)
            ratio = emp / pred.main_term if abs(pred.main_term) > 0 else None
            records.append(
                MomentRecord(
                    x=x,
                    z=complex(z),
                    empirical=emp,
                    main_term=pred.main_term,
                    exceptional_term=pred.exceptional_term,
                    ratio=ratio,
                )
            )
    return records


def export_moments_csv(records: list[MomentRecord], fh) -> None:
    """CSV columns x,re_z,im_z,re_empirical,im_empirical,re_main,im_main,re_ratio,im_ratio."""
    fh.write("x,re_z,im_z,re_empirical,im_empirical,re_main,im_main,re_ratio,im_ratio\n")
    for r in records:
        emp = r.empirical if r.empirical is not None else complex(float("nan"), float("nan"))
        ratio = r.ratio if r.ratio is not None else complex(float("nan"), float("nan"))
        fh.write(
            f"{r.x},{r.z.real:.10g},{r.z.imag:.10g},"
            f"{emp.real:.12g},{emp.imag:.12g},"
            f"{r.main_term.real:.12g},{r.main_term.imag:.12g},"
            f"{ratio.real:.12g},{ratio.imag:.12g}\n"
        )


def moments_report(
    records: list[MomentRecord], cfg: ModelConfig, cache_checksum: int | None
) -> dict:
    """JSON-ready report mirroring the CSV, with configuration metadata."""

    def cpx(v: complex | None):
        return None if v is None else {"re": v.real, "im": v.imag}

    return {
        "metadata": {
            "cache_checksum": cache_checksum,
            "config": {
                "prime_cutoff": cfg.prime_cutoff,
                "series_cutoff": cfg.series_cutoff,
                "mc_samples": cfg.mc_samples,
                "seed": cfg.seed,
                "tolerance": cfg.tolerance,
            },
        },
        "records": [
            {
                "x": r.x,
                "z": cpx(r.z),
                "empirical": cpx(r.empirical),
                "main_term": cpx(r.main_term),
                "exceptional_term": cpx(r.exceptional_term),
                "ratio": cpx(r.ratio),
            }
            for r in records
        ],
    }


def dump_report(report: dict, fh) -> None:
    json.dump(report, fh, indent=2, sort_keys=True)
    fh.write("\n")
