"""Numba kernels for the enumeration-heavy inner loops.

Kept separate so the pure-Python API modules stay readable; every kernel
has a straightforward scalar structure and releases the GIL, which lets
the sweep drivers run ranges on a thread pool with exact (order
independent) integer merges.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def forms_histogram_range(x_max: int, a_lo: int, a_hi: int, hist: np.ndarray) -> None:
    """Count reduced forms (a,b,c), b odd, 4ac - b^2 <= x_max, for a in [a_lo, a_hi).

    hist[|d|] accumulates the number of reduced primitive forms of
    discriminant d = b^2 - 4ac for every odd |d| <= x_max.  Reduction:
    |b| <= a <= c with b > 0 forced when |b| = a or a = c; interior forms
    count twice for the +-b pair.  Primitivity is automatic wherever
    |d| is squarefree, which covers every prime discriminant read off
    afterwards.
    """
    for a in range(a_lo, a_hi):
        four_a = 4 * a
        for b in range(1, a + 1, 2):
            c_max = (x_max + b * b) // four_a
            if c_max < a:
                continue
            dd = four_a * a - b * b
            hist[dd] += 1  # c = a: single form
            w = 1 if b == a else 2
            for c in range(a + 1, c_max + 1):
                hist[four_a * c - b * b] += w


@njit(cache=True, nogil=True)
def class_number_forms_scalar(abs_d: int) -> int:
    """Number of reduced primitive forms of discriminant -abs_d (fundamental)."""
    h = 0
    b = abs_d & 1  # b must match the parity of d
    while 3 * b * b <= abs_d:
        m4 = b * b + abs_d
        if m4 % 4 == 0:
            m = m4 // 4
            a = b if b > 1 else 1
            while a * a <= m:
                if m % a == 0:
                    c = m // a
                    if b == 0 or a == b or a == c:
                        h += 1
                    else:
                        h += 2
                a += 1
        b += 2
    return h


@njit(cache=True, nogil=True)
def dirichlet_range(ps: np.ndarray, out: np.ndarray) -> None:
    """Class numbers h(-p) via the finite Dirichlet formula, for primes p = 3 mod 4, p > 3.

    h = [sum over 0 < a < p/2 of (a/p)] / (2 - (2/p)); the Legendre values
    come from a quadratic-residue table built by squaring.  out[i] is set
    to -1 when the quotient is not a positive odd integer, which signals
    an internal inconsistency to the caller.
    """
    for i in range(ps.shape[0]):
        p = ps[i]
        half = (p - 1) // 2
        qr = np.zeros(p, dtype=np.uint8)
        for k in range(1, half + 1):
            qr[(k * k) % p] = 1
        cnt = 0
        for a in range(1, (p + 1) // 2):
            cnt += qr[a]
        s = 2 * cnt - half
        denom = 1 if p % 8 == 7 else 3  # 2 - (2/p)
        if s <= 0 or s % denom != 0:
            out[i] = -1
            continue
        h = s // denom
        out[i] = h if h % 2 == 1 else -1


@njit(cache=True, nogil=True)
def kronecker_first_many(ps: np.ndarray, n0: int, out: np.ndarray) -> None:
    """Kronecker symbols (-p/n0) for an array of odd primes p, fixed n0 >= 1."""
    for i in range(ps.shape[0]):
        d = -ps[i]
        n = n0
        r = 1
        if n % 2 == 0:
            t = 0
            while n % 2 == 0:
                n //= 2
                t += 1
            dm8 = d % 8
            if t % 2 == 1 and (dm8 == 3 or dm8 == 5):
                r = -1
        a = d % n
        while a != 0:
            while a % 2 == 0:
                a //= 2
                nm8 = n % 8
                if nm8 == 3 or nm8 == 5:
                    r = -r
            tmp = a
            a = n
            n = tmp
            if a % 4 == 3 and n % 4 == 3:
                r = -r
            a %= n
        out[i] = r if n == 1 else 0


@njit(cache=True, nogil=True)
def kronecker_many(d: int, ns: np.ndarray, out: np.ndarray) -> None:
    """Kronecker symbols (d/n) for an array of n >= 1 (d odd, nonzero)."""
    for i in range(ns.shape[0]):
        n = ns[i]
        r = 1
        if n % 2 == 0:
            t = 0
            while n % 2 == 0:
                n //= 2
                t += 1
            dm8 = d % 8
            if t % 2 == 1 and (dm8 == 3 or dm8 == 5):
                r = -1
        a = d % n
        while a != 0:
            while a % 2 == 0:
                a //= 2
                nm8 = n % 8
                if nm8 == 3 or nm8 == 5:
                    r = -r
            tmp = a
            a = n
            n = tmp
            if a % 4 == 3 and n % 4 == 3:
                r = -r
            a %= n
        if n != 1:
            r = 0
        out[i] = r
