"""Exact class numbers for prime discriminants, by two independent routes.

The `forms` route counts reduced primitive positive-definite binary
quadratic forms; the `dirichlet` route evaluates the finite character-sum
form of the class number formula.  Sweeps produce a per-prime table
(p, h(-p)) that is cached to disk and feeds histograms, moment sums and
character-sum experiments.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _fast, cache
from .arith import factorize, kronecker, log_integral, sieve_primes
from .errors import (
    BoundError,
    DomainError,
    InsufficientSweepError,
    InternalInconsistencyError,
)

FORMS_SWEEP_MAX = 10**8
DIRICHLET_SWEEP_MAX = 10**7
FORMS_SINGLE_MAX = 10**9

# True L(1, chi_{-3}) = pi/(3*sqrt(3)).  The bare formula pi*h/sqrt|d|
# is off by the unit-group factor 3 at d = -3, so this constant is kept
# out of L1() and used wherever the -3 term genuinely matters.
L1_MINUS3 = math.pi / (3.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class PrimeDiscriminant:
    """A prime p = 3 mod 4 with discriminant d = -p and optional class number."""

    p: int
    h: int | None = None

    def __post_init__(self):
        if self.p % 4 != 3 or not _is_prime(self.p):
            raise DomainError(f"{self.p} is not a prime congruent to 3 mod 4")

    @property
    def d(self) -> int:
        return -self.p


@dataclass(frozen=True)
class ReducedForm:
    """Reduced primitive form (a, b, c): |b| <= a <= c, b >= 0 on ties, gcd 1."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if a < 1 or self.discriminant >= 0:
            raise DomainError(f"({a},{b},{c}) is not positive definite")
        if not (abs(b) <= a <= c):
            raise DomainError(f"({a},{b},{c}) is not reduced")
        if (abs(b) == a or a == c) and b < 0:
            raise DomainError(f"({a},{b},{c}) violates the boundary tie rule")
        if math.gcd(math.gcd(a, abs(b)), c) != 1:
            raise DomainError(f"({a},{b},{c}) is imprimitive")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c


@dataclass(frozen=True)
class ClassTable:
    """Per-prime class numbers for all p <= X, p = 3 mod 4."""

    X: int
    method: str
    p: np.ndarray  # int64, ascending
    h: np.ndarray  # int64

    @property
    def checksum(self) -> int:
        return cache.table_checksum(self.p, self.h)

    def restrict(self, x: int) -> "ClassTable":
        if x > self.X:
            raise InsufficientSweepError(f"table covers X={self.X}, asked for {x}")
        k = int(np.searchsorted(self.p, x, side="right"))
        return ClassTable(X=x, method=self.method, p=self.p[:k], h=self.h[:k])


@dataclass(frozen=True)
class ClassHistogram:
    """Counts {h -> #primes p <= X with h(-p) = h}, all keys odd."""

    X: int
    counts: dict[int, int]
    method_tag: str
    checksum: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if n % p == 0:
            return n == p
    d = 37
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def is_fundamental_discriminant(d: int) -> bool:
    """True when d is the discriminant of a quadratic field."""
    if d == 0 or d == 1:
        return False
    if d % 4 == 1:
        return _is_squarefree(abs(d))
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _is_squarefree(abs(m))
    return False


def _is_squarefree(n: int) -> bool:
    for p, e in factorize(n):
        if e > 1:
            return False
    return True


def reduced_forms(d: int) -> list[ReducedForm]:
    """All reduced primitive forms of fundamental discriminant d < 0.

    Direct enumeration; intended for small |d| and as the reference
    route behind class_number_forms.
    """
    _check_forms_domain(d)
    abs_d = -d
    out = []
    for a in range(1, math.isqrt(abs_d // 3) + 1):
        for b in range(-a, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if (abs(b) == a or a == c) and b < 0:
                continue
            out.append(ReducedForm(a, b, c))
    return out


def _check_forms_domain(d: int) -> None:
    if d >= 0 or not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a negative fundamental discriminant")
    if -d > FORMS_SINGLE_MAX:
        raise BoundError(f"|d| = {-d} exceeds the form-count bound {FORMS_SINGLE_MAX}")


def class_number_forms(d: int) -> int:
    """h(d) as the number of reduced primitive forms of discriminant d < 0."""
    _check_forms_domain(d)
    return int(_fast.class_number_forms_scalar(-d))


def class_number_dirichlet(p: int) -> int:
    """h(-p) from the finite Dirichlet character sum, for prime p = 3 mod 4, p > 3."""
    if p <= 3 or p % 4 != 3 or not _is_prime(p):
        raise DomainError(f"dirichlet route needs a prime p = 3 mod 4 with p > 3, got {p}")
    out = np.empty(1, dtype=np.int64)
    _fast.dirichlet_range(np.array([p], dtype=np.int64), out)
    if out[0] < 0:
        raise InternalInconsistencyError(f"character sum at p={p} gave a non-integral or even quotient")
    return int(out[0])


def L1(d: int, h: int) -> float:
    """L(1, chi_d) = pi*h/sqrt(|d|) from the class number, for fundamental d < -4."""
    if d >= -4:
        raise DomainError(f"class number formula used only for d < -4, got {d}")
    if not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a fundamental discriminant")
    if h < 1:
        raise DomainError(f"class number must be positive, got {h}")
    return math.pi * h / math.sqrt(-d)


def l1_true(p: int, h: int) -> float:
    """L(1, chi_{-p}) for a swept prime, with the p = 3 unit correction."""
    return L1_MINUS3 if p == 3 else math.pi * h / math.sqrt(p)


def _forms_sweep(x: int, threads: int) -> tuple[np.ndarray, np.ndarray]:
    a_max = math.isqrt(x // 3)
    hist = np.zeros(x + 1, dtype=np.uint32)
    if threads <= 1 or a_max < 64:
        _fast.forms_histogram_range(x, 1, a_max + 1, hist)
    else:
        # Work per value of a is roughly constant (~X/8 increments), so
        # equal a-slices balance well.  Each worker owns a private
        # histogram; integer merges are exact, hence schedule independent.
        nchunks = min(threads * 2, a_max)
        bounds = np.linspace(1, a_max + 1, nchunks + 1).astype(np.int64)
        partials = [np.zeros(x + 1, dtype=np.uint32) for _ in range(nchunks)]

        def work(i: int) -> None:
            _fast.forms_histogram_range(x, int(bounds[i]), int(bounds[i + 1]), partials[i])

        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, range(nchunks)))
        for part in partials:
            hist += part
    ps = sieve_primes(x, class_3mod4=True).primes
    return ps, hist[ps].astype(np.int64)


def _dirichlet_sweep(x: int, threads: int) -> tuple[np.ndarray, np.ndarray]:
    ps = sieve_primes(x, class_3mod4=True).primes
    hs = np.empty(len(ps), dtype=np.int64)
    if len(ps) and ps[0] == 3:
        hs[0] = 1  # h(-3) from the form count; the formula needs p > 3
    start = 1 if (len(ps) and ps[0] == 3) else 0
    rest = ps[start:]
    out = hs[start:]
    if threads <= 1 or len(rest) < 256:
        _fast.dirichlet_range(rest, out)
    else:
        nchunks = threads * 4
        edges = np.linspace(0, len(rest), nchunks + 1).astype(np.int64)

        def work(i: int) -> None:
            _fast.dirichlet_range(rest[edges[i] : edges[i + 1]], out[edges[i] : edges[i + 1]])

        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, range(nchunks)))
    if np.any(hs < 0):
        bad = ps[np.nonzero(hs < 0)[0][0]]
        raise InternalInconsistencyError(f"dirichlet quotient failed at p={bad}")
    return ps, hs


def sweep_class_numbers(
    x: int,
    method: str = "forms",
    threads: int = 1,
    cache_dir: Path | str | None = None,
) -> ClassTable:
    """Class numbers h(-p) for every prime p <= x, p = 3 mod 4.

    Results are cached to disk keyed by (x, method) when cache_dir is
    given; a warm cache is validated (magic/version/checksum) and reused.
    """
    if method == "forms":
        if x > FORMS_SWEEP_MAX:
            raise BoundError(f"forms sweep capped at {FORMS_SWEEP_MAX}")
    elif method == "dirichlet":
        if x > DIRICHLET_SWEEP_MAX:
            raise BoundError(f"dirichlet sweep capped at {DIRICHLET_SWEEP_MAX}")
    else:
        raise DomainError(f"unknown sweep method {method!r}")
    if x < 3:
        raise BoundError(f"sweep bound {x} too small")

    path = None
    if cache_dir is not None:
        path = cache.cache_path(Path(cache_dir), x, method)
        if path.exists():
            cx, cm, ps, hs = cache.read_table(path)
            if cx == x and cm == method:
                return ClassTable(X=x, method=method, p=ps, h=hs)

    ps, hs = _forms_sweep(x, threads) if method == "forms" else _dirichlet_sweep(x, threads)
    table = ClassTable(X=x, method=method, p=ps, h=hs)
    if path is not None:
        cache.write_table(path, x, method, ps, hs)
    return table


def build_histogram(
    x: int,
    method: str = "forms",
    threads: int = 1,
    cache_dir: Path | str | None = None,
) -> ClassHistogram:
    """Exact histogram {h -> count} over all prime discriminants with p <= x."""
    table = sweep_class_numbers(x, method=method, threads=threads, cache_dir=cache_dir)
    values, counts = np.unique(table.h, return_counts=True)
    return ClassHistogram(
        X=x,
        counts={int(v): int(c) for v, c in zip(values, counts)},
        method_tag=method,
        checksum=table.checksum,
    )


def coverage_bound(h_max: int, table: ClassTable) -> float:
    """Heuristic sweep bound needed to have seen every prime discriminant with h <= h_max.

    Inverts the class number formula at the smallest L(1) value observed
    in the sweep and applies a safety factor of 4: any unseen p with
    h <= h_max would need L(1, chi_{-p}) < pi*h_max/sqrt(X).
    """
    if len(table.p) == 0:
        return math.inf
    l_min = float(np.min(np.pi * table.h / np.sqrt(table.p)))
    if table.p[0] == 3:
        l_min = min(l_min if len(table.p) > 1 else math.inf, L1_MINUS3)
    return 4.0 * (math.pi * h_max / l_min) ** 2


def sum_odd_F(h_max: int, table: ClassTable, require_coverage: bool = True) -> int:
    """Number of imaginary quadratic fields with odd class number <= h_max.

    Counts prime discriminants in the sweep with h <= h_max and adds the
    two composite discriminants -4, -8 (class number 1).  With
    require_coverage the call refuses to undercount: it raises unless the
    sweep bound exceeds coverage_bound(h_max, table).  Callers that opt
    out must surface the coverage caveat themselves (the CLI does).
    """
    if h_max < 1:
        return 0
    if require_coverage:
        needed = coverage_bound(h_max, table)
        if table.X < needed:
            raise InsufficientSweepError(
                f"sweep X={table.X} below coverage bound {needed:.3g} for h <= {h_max}"
            )
    return int(np.count_nonzero(table.h <= h_max)) + 2


@dataclass(frozen=True)
class CharSumResult:
    """Exact character sum over prime discriminants, with the predicted main term."""

    x: int
    n: int
    value: int
    predicted_main: float
    n_primes: int = field(default=0)


def squarefree_part(n: int) -> int:
    out = 1
    for p, e in factorize(n):
        if e % 2:
            out *= p
    return out


def char_sum_over_P(x: int, n: int) -> CharSumResult:
    """Sum of chi_d(n) over prime discriminants d = -p, p <= x.

    Evaluates Kronecker symbols directly over the sieved primes; the
    reciprocity-based prediction (Li(x)/2 when n is a perfect square,
    else 0) is reported alongside, never substituted.
    """
    if not 1 <= n <= 10**6:
        raise DomainError(f"char sum supports 1 <= n <= 10^6, got {n}")
    ps = sieve_primes(x, class_3mod4=True).primes
    out = np.empty(len(ps), dtype=np.int64)
    _fast.kronecker_first_many(ps, n, out)
    predicted = log_integral(x) / 2.0 if squarefree_part(n) == 1 else 0.0
    return CharSumResult(x=x, n=n, value=int(out.sum()), predicted_main=predicted, n_primes=len(ps))


def character_table(d: int, n_max: int) -> np.ndarray:
    """chi_d(n) for 0 <= n <= n_max as a float array (chi_d completely multiplicative).

    Values at primes come from the Kronecker symbol; composites are
    filled by strided products over prime-power slices.
    """
    if d >= 0 or d % 2 == 0:
        raise DomainError(f"character table implemented for odd d < 0, got {d}")
    ps = sieve_primes(max(n_max, 2)).primes
    chi_p = np.empty(len(ps), dtype=np.int64)
    _fast.kronecker_many(d, ps, chi_p)
    chi = np.ones(n_max + 1, dtype=np.float64)
    chi[0] = 0.0
    for p, cp in zip(ps.tolist(), chi_p.tolist()):
        if p > n_max:
            break
        pk = p
        while pk <= n_max:
            chi[pk::pk] *= cp
            pk *= p
    return chi


def export_table_csv(table: ClassTable, fh) -> None:
    """CSV columns p,d,h,L1 for a swept class-number table."""
    fh.write("p,d,h,L1\n")
    for p, h in zip(table.p.tolist(), table.h.tolist()):
        fh.write(f"{p},{-p},{h},{l1_true(p, h):.12g}\n")
