"""Exact integer and number-theoretic primitives.

Segmented prime sieve, Kronecker symbol, the generalized divisor function
d_z, the logarithmic integral Li(x) = integral of dt/log t from 2 to x,
and the zeta constants used by the asymptotic formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import BoundError, DomainError

SIEVE_MAX = 2**48
_SEGMENT = 1 << 20


@dataclass(frozen=True)
class PrimeList:
    """Ascending primes up to `bound`, optionally restricted to p = 3 mod 4."""

    bound: int
    residue_class: str  # "all" or "3mod4"
    primes: np.ndarray  # int64, strictly increasing

    def __len__(self) -> int:
        return len(self.primes)


def _simple_sieve(limit: int) -> np.ndarray:
    """Plain Eratosthenes up to `limit` inclusive; used for base primes."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if mask[i]:
            mask[i * i :: i] = False
    return np.nonzero(mask)[0].astype(np.int64)


@lru_cache(maxsize=8)
def _sieve_cached(x: int) -> np.ndarray:
    # Segmented sieve: memory stays O(sqrt(x) + segment) and each segment
    # is a cache-friendly block.  Segments are processed in order, so the
    # result is deterministic.
    base = _simple_sieve(math.isqrt(x))
    if x < _SEGMENT:
        mask = np.ones(x + 1, dtype=bool)
        mask[:2] = False
        for p in base:
            mask[p * p :: p] = False
        return np.nonzero(mask)[0].astype(np.int64)
    chunks = [base[base <= x]] if len(base) else []
    lo = int(math.isqrt(x)) + 1
    while lo <= x:
        hi = min(lo + _SEGMENT, x + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                seg[start - lo :: p] = False
        chunks.append(np.nonzero(seg)[0].astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


def sieve_primes(x: int, class_3mod4: bool = False) -> PrimeList:
    """All primes <= x, or only those congruent to 3 mod 4."""
    if not 2 <= x <= SIEVE_MAX:
        raise BoundError(f"sieve bound {x} outside [2, 2^48]")
    primes = _sieve_cached(int(x))
    if class_3mod4:
        primes = primes[primes % 4 == 3]
    return PrimeList(bound=int(x), residue_class="3mod4" if class_3mod4 else "all", primes=primes)


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n >= 0; completely multiplicative in n.

    (d/0) is 0 unless |d| = 1, and (d/2) follows the d mod 8 rule.
    """
    if d == 0:
        raise DomainError("kronecker symbol needs d != 0")
    if n < 0:
        raise DomainError("kronecker symbol defined here for n >= 0")
    if n == 0:
        return 1 if d in (1, -1) else 0
    result = 1
    if n % 2 == 0:
        if d % 2 == 0:
            return 0
        t = 0
        while n % 2 == 0:
            n //= 2
            t += 1
        if t % 2 == 1 and d % 8 in (3, 5):
            result = -1
    # Jacobi symbol (d/n) for odd n >= 1; periodic in d mod n.
    a = d % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@lru_cache(maxsize=4)
def _trial_primes(limit: int) -> tuple[int, ...]:
    return tuple(int(p) for p in _simple_sieve(limit))


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 by trial division, as (p, exponent) pairs."""
    if n < 1:
        raise DomainError(f"cannot factorize {n}")
    out: list[tuple[int, int]] = []
    limit = math.isqrt(n)
    for p in _trial_primes(max(1 << 16, 2)) if limit <= (1 << 16) else _trial_primes(limit):
        if p > limit:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
            limit = math.isqrt(n)
    if n > 1:
        out.append((n, 1))
    return out


def divisor_z_local(z: complex, a: int) -> complex:
    """Local factor d_z(p^a) = z(z+1)...(z+a-1)/a! as a finite product.

    Avoids gamma ratios, so non-positive integer z (where Gamma(z) has
    poles) is handled exactly: d_{-1} is the Moebius function, etc.
    """
    num = complex(1.0)
    for j in range(a):
        num *= z + j
    return num / math.factorial(a)


def divisor_z(n: int, z: complex) -> complex:
    """Generalized divisor function d_z(n), multiplicative with d_z(p) = z."""
    if n < 1:
        raise DomainError(f"d_z needs n >= 1, got {n}")
    value = complex(1.0)
    for _, a in factorize(n):
        value *= divisor_z_local(z, a)
    return value


def divisor_z_table(z: complex, n_max: int) -> np.ndarray:
    """d_z(n) for 1 <= n <= n_max as a complex array (index = n).

    Multiplicative sieve fill: each prime power slice is scaled by the
    local ratio d_z(p^a)/d_z(p^(a-1)).  A zero local value stays zero for
    all higher powers, so zero ratios are safe.
    """
    T = np.ones(n_max + 1, dtype=np.complex128)
    T[0] = 0.0
    for p in _sieve_cached(max(n_max, 2)).tolist():
        if p > n_max:
            break
        prev = 1.0 + 0.0j
        pk = p
        a = 1
        while pk <= n_max:
            cur = divisor_z_local(z, a)
            ratio = cur / prev if prev != 0 else 0.0
            T[pk::pk] *= ratio
            prev = cur
            pk *= p
            a += 1
    return T


def log_integral(x: float) -> float:
    """Li(x) = integral of 1/log t over [2, x], by adaptive quadrature."""
    if x < 2:
        raise DomainError(f"Li(x) defined for x >= 2, got {x}")
    if x == 2:
        return 0.0
    value, _ = quad(lambda t: 1.0 / math.log(t), 2.0, float(x), epsabs=1e-12, epsrel=1e-12, limit=200)
    return value


def zeta3(tol: float = 1e-12) -> float:
    """zeta(3) by direct series summation with an Euler-Maclaurin tail."""
    m = 100_000
    n = np.arange(1, m + 1, dtype=np.float64)
    partial = float(np.sum(1.0 / n**3))
    # Tail sum_{n>m} n^-3 = 1/(2m^2) - 1/(2m^3) + 1/(4m^4) - O(m^-6),
    # far below the requested tolerance.
    tail = 0.5 / m**2 - 0.5 / m**3 + 0.25 / m**4
    assert 1.0 / (4 * m**4) < tol
    return partial + tail


def zeta_constants() -> dict[int, float]:
    """{2: zeta(2), 3: zeta(3), 4: zeta(4)}; 2 and 4 exactly via pi."""
    return {2: math.pi**2 / 6.0, 3: zeta3(), 4: math.pi**4 / 90.0}
