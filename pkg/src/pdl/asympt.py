"""Smoothed Perron kernel and the asymptotic main terms and constants.

The kernel I_{c,lambda,N}(y) is a mollified indicator of {y > 1} with
transition window [e^(-lambda*N), 1], evaluated by vectorized composite
Gauss-Legendre quadrature along the vertical line Re(s) = c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .arith import factorize, sieve_primes, zeta3
from .errors import AccuracyError, DomainError

_N1_TMAX_CAP = 5.0e6  # N = 1 integrand only decays like 1/t^2


@dataclass(frozen=True)
class KernelParams:
    c: float
    lam: float
    N: int
    quad_tol: float = 1e-8
    T_max: float | None = None

    def __post_init__(self):
        if self.c <= 0 or self.lam <= 0 or self.N < 0 or self.quad_tol <= 0:
            raise DomainError(f"invalid kernel parameters {self}")

    @property
    def window_lo(self) -> float:
        return math.exp(-self.lam * self.N)


def kernel_params_for(h_bound: float, quad_tol: float = 1e-8) -> KernelParams:
    """Default kernel parameters for a class-number bound H.

    c = 1/log H, T = sqrt(log X)/(loglog X)^2 with X = H^2 (log H)^5,
    lambda = 10/T and N = floor(10 * loglog H) (iterated logarithms).
    """
    if h_bound <= math.e:
        raise DomainError("parameter defaults need H > e")
    log_h = math.log(h_bound)
    big_x = h_bound**2 * log_h**5
    t = math.sqrt(math.log(big_x)) / math.log(math.log(big_x)) ** 2
    return KernelParams(
        c=1.0 / log_h, lam=10.0 / t, N=int(10.0 * math.log(log_h)), quad_tol=quad_tol
    )


def _factor_bound(params: KernelParams) -> float:
    # |e^(lambda*s) - 1| <= e^(lambda*c) + 1 on Re(s) = c; the classical
    # bound 3 applies once lambda*c <= log 2.
    return max(3.0, math.exp(params.lam * params.c) + 1.0)


def _auto_t_max(y: float, params: KernelParams) -> float:
    b = _factor_bound(params)
    n = params.N
    if n >= 2:
        # tail of (1/pi) * int_T^inf y^c (B/(lambda t))^N dt/t below tol/2
        return (b / params.lam) * (2.0 * y**params.c / (math.pi * n * params.quad_tol)) ** (1.0 / n)
    # N = 1: tail bound y^c * B / (pi * lambda * T)
    return y**params.c * b / (math.pi * params.lam * (params.quad_tol / 2.0))


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _integral_0_T(y: float, params: KernelParams, t_max: float, nseg: int, order: int) -> float:
    """(1/pi) * int_0^T Re[ y^s ((e^(ls)-1)/(ls))^N / s ] dt at s = c + it."""
    nodes, weights = _gl_nodes(order)
    edges = np.linspace(0.0, t_max, nseg + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    s = params.c + 1j * t
    w = (np.exp(params.lam * s) - 1.0) / (params.lam * s)
    vals = (np.exp(s * math.log(y)) * w**params.N / s).real
    seg_sums = vals.reshape(nseg, order) @ weights
    return float(half @ seg_sums) / math.pi


def kernel_I(y: float, params: KernelParams) -> float:
    """Smoothed Perron indicator: 1 for y > 1, 0 for y < e^(-lambda*N), in [0,1] between.

    N = 0 is the classical sharp indicator, handled analytically.  For
    N >= 1 the vertical-line integral is truncated where the factor-wise
    bound drives the tail below quad_tol, then integrated by composite
    Gauss-Legendre with one refinement doubling as the error estimate.
    """
    if y <= 0:
        raise DomainError(f"kernel argument must be positive, got {y}")
    if params.N == 0:
        return 1.0 if y > 1 else (0.5 if y == 1 else 0.0)
    t_max = params.T_max if params.T_max is not None else _auto_t_max(y, params)
    tail = _tail_bound(y, params, t_max)
    if params.N == 1 and t_max > _N1_TMAX_CAP:
        raise AccuracyError(
            f"N=1 kernel tail needs T_max={t_max:.3g} beyond the cap {_N1_TMAX_CAP:.3g}",
            achieved=_tail_bound(y, params, _N1_TMAX_CAP),
        )
    # Segment length tracks the integrand's oscillation rate.
    rate = abs(math.log(y)) + params.lam * params.N + 1.0 / params.c + 1.0
    nseg = max(8, int(t_max * rate / 6.0) + 1)
    order = 16
    coarse = _integral_0_T(y, params, t_max, nseg, order)
    for _ in range(3):
        fine = _integral_0_T(y, params, t_max, 2 * nseg, order)
        err = abs(fine - coarse)
        if err <= params.quad_tol / 2.0:
            return fine
        coarse = fine
        nseg *= 2
    raise AccuracyError("kernel quadrature did not converge", achieved=err + tail)


def _tail_bound(y: float, params: KernelParams, t_max: float) -> float:
    b = _factor_bound(params)
    if params.N >= 2:
        return y**params.c * b**params.N / (math.pi * params.N * (params.lam * t_max) ** params.N)
    return y**params.c * b / (math.pi * params.lam * t_max)


def theorem1_main(h_bound: float) -> float:
    """Leading term (15/4) * H^2 / log H for the count of odd class numbers <= H."""
    if h_bound <= 1:
        raise DomainError(f"main term needs H > 1, got {h_bound}")
    return 3.75 * h_bound**2 / math.log(h_bound)


def sound_main(h_bound: float) -> float:
    """Leading term 3*zeta(2)/zeta(3) * H^2 for the count over all class numbers <= H."""
    if h_bound < 0:
        raise DomainError(f"main term needs H >= 0, got {h_bound}")
    return 3.0 * (math.pi**2 / 6.0) / zeta3() * h_bound**2


@dataclass(frozen=True)
class ConstantResult:
    value: float
    tail_bound: float
    prime_cutoff: int
    power_cutoff: int


@lru_cache(maxsize=4)
def conjecture_C(prime_cutoff: int = 4 * 10**6, power_cutoff: int = 64) -> ConstantResult:
    """The constant 15 * prod_{p>2} prod_{i>=2} (1 - p^-i), with a rigorous tail bound.

    Truncation error: each omitted factor contributes at most
    -log(1-x) <= 1.2x of log-tail for x <= 1/9; summed over primes beyond
    the cutoff via pi(t) <= 1.26 t/log t this stays below 1e-6 at the
    default cutoffs.
    """
    ps = sieve_primes(prime_cutoff).primes[1:].astype(np.float64)  # odd primes
    log_sum = 0.0
    for i in range(2, power_cutoff + 1):
        cut = 10.0 ** (20.0 / i)
        sub = ps[ps <= cut] if cut < prime_cutoff else ps
        if len(sub) == 0:
            break
        log_sum += float(np.sum(np.log1p(-(sub ** (-float(i))))))
    value = 15.0 * math.exp(log_sum)
    p_tail_log = 1.8 * 2.52 / (prime_cutoff * math.log(prime_cutoff))
    i_tail_log = 3.6 * 3.0 ** (-(power_cutoff + 1))
    tail = value * math.expm1(p_tail_log + i_tail_log)
    return ConstantResult(
        value=value, tail_bound=tail, prime_cutoff=prime_cutoff, power_cutoff=power_cutoff
    )


def conjecture_c_of_h(h: int) -> float:
    """Arithmetic factor prod_{p^n || h} prod_{i=1..n} (1 - p^-i)^-1, odd h."""
    if h < 1 or h % 2 == 0:
        raise DomainError(f"arithmetic factor defined for odd h >= 1, got {h}")
    value = 1.0
    for p, n in factorize(h):
        for i in range(1, n + 1):
            value /= 1.0 - float(p) ** (-i)
    return value


def conjecture_F(h: int) -> float:
    """Conjectured density C * c(h) * h / log h of fields with odd class number h."""
    if h <= 1:
        raise DomainError(f"conjectured count needs odd h >= 3, got {h}")
    return conjecture_C().value * conjecture_c_of_h(h) * h / math.log(h)


def export_kernel_csv(ys: list[float], params: KernelParams, fh) -> None:
    """CSV columns y,value,params."""
    ptag = f"c={params.c:.6g};lambda={params.lam:.6g};N={params.N};tol={params.quad_tol:.3g}"
    fh.write("y,value,params\n")
    for y in ys:
        fh.write(f"{y:.10g},{kernel_I(y, params):.12g},{ptag}\n")


def export_conjecture_csv(h_values: list[int], observed: dict[int, int], fh) -> None:
    """CSV columns h,F_observed,F_conjectured,ratio (ratio blank when undefined)."""
    fh.write("h,F_observed,F_conjectured,ratio\n")
    for h in h_values:
        obs = observed.get(h, 0)
        conj = conjecture_F(h)
        ratio = f"{obs / conj:.6g}" if conj > 0 else ""
        fh.write(f"{h},{obs},{conj:.8g},{ratio}\n")
