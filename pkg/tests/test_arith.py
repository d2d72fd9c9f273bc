import math

import numpy as np
import pytest
from scipy.special import expi

from pdl import arith
from pdl.errors import BoundError, DomainError

from conftest import naive_primes


# ---------------------------------------------------------------- sieve

def test_sieve_small_examples():
    assert arith.sieve_primes(10).primes.tolist() == [2, 3, 5, 7]
    assert arith.sieve_primes(100, class_3mod4=True).primes.tolist() == [
        3, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83,
    ]
    assert arith.sieve_primes(2, class_3mod4=True).primes.tolist() == []


def test_sieve_against_reference():
    ref = naive_primes(10**5)
    got = arith.sieve_primes(10**5).primes
    assert np.array_equal(got, ref)
    got34 = arith.sieve_primes(10**5, class_3mod4=True).primes
    assert np.array_equal(got34, ref[ref % 4 == 3])


def test_sieve_segment_boundary():
    # crosses the 2^20 segment size
    x = (1 << 21) + 12345
    ref = naive_primes(x)
    assert np.array_equal(arith.sieve_primes(x).primes, ref)


def test_sieve_bounds():
    with pytest.raises(BoundError):
        arith.sieve_primes(1)
    with pytest.raises(BoundError):
        arith.sieve_primes(2**48 + 1)


# ------------------------------------------------------------- kronecker

def kron_ref(d: int, n: int) -> int:
    """Independent reference: Euler criterion at odd primes, multiplicative fill."""
    if n == 0:
        return 1 if abs(d) == 1 else 0
    out = 1
    for p, e in arith.factorize(n):
        if p == 2:
            if d % 2 == 0:
                s = 0
            else:
                s = 1 if d % 8 in (1, 7) else -1
        elif d % p == 0:
            s = 0
        else:
            r = pow(d % p, (p - 1) // 2, p)
            s = 1 if r == 1 else -1
        out *= s**e
    return out


def test_kronecker_examples():
    for d in (-3, -7, 5, -163, 12):
        assert arith.kronecker(d, 1) == 1
    assert arith.kronecker(-3, 5) == -1
    assert arith.kronecker(-7, 2) == 1
    assert arith.kronecker(1, 0) == 1
    assert arith.kronecker(-1, 0) == 1
    assert arith.kronecker(-7, 0) == 0
    with pytest.raises(DomainError):
        arith.kronecker(0, 5)


def test_kronecker_against_reference():
    rng = np.random.default_rng(7)
    for _ in range(400):
        d = int(rng.integers(-200, 200)) or -3
        n = int(rng.integers(1, 5000))
        assert arith.kronecker(d, n) == kron_ref(d, n), (d, n)


@pytest.mark.parametrize("d", [-3, -7, -11, -163])
def test_kronecker_complete_multiplicativity_exhaustive(d):
    # (d/mn) = (d/m)(d/n) for all 1 <= m, n <= 10^4, via the period table
    q = -d
    table = np.array([arith.kronecker(d, r) for r in range(q)], dtype=np.int64)
    vals = table[np.arange(1, 10**4 + 1) % q]
    for lo in range(1, 10**4 + 1, 500):
        m = np.arange(lo, min(lo + 500, 10**4 + 1))
        prod_mn = table[np.outer(m, np.arange(1, 10**4 + 1)) % q]
        assert np.array_equal(prod_mn, np.outer(vals[m - 1], vals))


@pytest.mark.parametrize("d", [-3, -7, -11, -163])
def test_kronecker_periodicity(d):
    for n in range(1, 10**4 + 1):
        assert arith.kronecker(d, n) == arith.kronecker(d, n + (-d))


# ------------------------------------------------------------- divisor_z

def test_divisor_z_examples():
    for p in (2, 3, 97):
        assert arith.divisor_z(p, 3 + 1j) == pytest.approx(3 + 1j)
    assert arith.divisor_z(12, 2) == pytest.approx(6)  # d(12) by listing
    assert arith.divisor_z(4, -1) == 0  # Moebius at p^2
    assert arith.divisor_z(4, 0.5) == pytest.approx(0.375)
    with pytest.raises(DomainError):
        arith.divisor_z(0, 1)


def test_divisor_z_is_divisor_count_at_2():
    for n in range(1, 500):
        count = sum(1 for k in range(1, n + 1) if n % k == 0)
        assert arith.divisor_z(n, 2) == pytest.approx(count)


def test_divisor_z_moebius_at_minus1():
    def moebius(n):
        fac = arith.factorize(n)
        if any(e > 1 for _, e in fac):
            return 0
        return (-1) ** len(fac)

    for n in range(1, 300):
        assert arith.divisor_z(n, -1) == pytest.approx(moebius(n))


def test_divisor_z_table_matches_pointwise():
    z = 1.5 - 2j
    table = arith.divisor_z_table(z, 2000)
    for n in (1, 2, 12, 64, 97, 360, 1024, 1999, 2000):
        assert table[n] == pytest.approx(arith.divisor_z(n, z), rel=1e-12)


def test_d1_identity_and_multiplicativity():
    table = arith.divisor_z_table(1.0, 10**4)
    assert np.allclose(table[1:], 1.0)
    rng = np.random.default_rng(11)
    z = 0.5 + 1.25j
    pairs = 0
    while pairs < 1000:
        m = int(rng.integers(2, 2000))
        n = int(rng.integers(2, 2000))
        if math.gcd(m, n) != 1:
            continue
        pairs += 1
        lhs = arith.divisor_z(m * n, z)
        rhs = arith.divisor_z(m, z) * arith.divisor_z(n, z)
        assert lhs == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("z", [2.5, -3.7, 4 + 2j, -1 + 0.5j, 5.0])
def test_divisor_bound_by_dk(z):
    # |d_z(n)| <= d_k(n) with k = floor(|z|) + 1, for n <= 10^4
    k = math.floor(abs(z)) + 1
    tz = arith.divisor_z_table(z, 10**4)
    tk = arith.divisor_z_table(float(k), 10**4).real
    assert np.all(np.abs(tz[1:]) <= tk[1:] * (1 + 1e-12))


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("y", [10.0, 100.0])
def test_smoothed_divisor_sum_bound(k, y):
    cutoff = int(50 * y * math.log(y) ** 2)
    n = np.arange(1, cutoff + 1, dtype=np.float64)
    dk = arith.divisor_z_table(float(k), cutoff).real[1:]
    total = float(np.sum(dk * np.exp(-n / y) / n))
    assert total <= math.log(2 * y) ** k


# ---------------------------------------------------------- log integral

def test_log_integral_values():
    assert arith.log_integral(2) == 0.0
    # oracle: li(x) - li(2) via the exponential integral
    oracle = float(expi(math.log(1e6)) - expi(math.log(2.0)))
    got = arith.log_integral(1e6)
    assert got == pytest.approx(oracle, abs=1e-6)
    assert got == pytest.approx(78626.503996, abs=1e-4)
    assert arith.log_integral(10**5) < arith.log_integral(10**6)
    with pytest.raises(DomainError):
        arith.log_integral(1.5)


def test_log_integral_second_quadrature():
    # cross-check the adaptive quadrature with a fixed high-order rule on
    # the substituted integral int e^u/u du over [log 2, log x]
    nodes, weights = np.polynomial.legendre.leggauss(200)
    for x in (10.0, 1e4, 1e6):
        a, b = math.log(2.0), math.log(x)
        u = 0.5 * (b - a) * nodes + 0.5 * (b + a)
        ref = float(0.5 * (b - a) * np.sum(weights * np.exp(u) / u))
        assert arith.log_integral(x) == pytest.approx(ref, rel=1e-9)


# ------------------------------------------------------------------ zeta

def test_zeta_constants():
    zc = arith.zeta_constants()
    assert zc[2] == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert zc[4] == pytest.approx(math.pi**4 / 90, rel=1e-15)
    assert zc[3] == pytest.approx(1.2020569031595943, abs=1e-12)
    assert zc[2] / zc[4] == pytest.approx(15 / math.pi**2, rel=1e-14)
