"""The random +-1 Euler product: exact expectations and Monte Carlo sampling.

L(1, X) = prod over primes p of (1 - X(p)/p)^(-1), where the X(p) are
independent fair +-1 signs.  Expectations of X(q) * L(1,X)^z have both a
closed product form (over primes) and a series form (over m, with the
generalized divisor function); both are implemented with explicit
truncation error budgets and cross-check each other.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import divisor_z_local, factorize, sieve_primes
from .errors import ConfigError, ConvergenceError, DomainError

EULER_GAMMA = float(np.euler_gamma)
_BLOCK = 8192  # fixed Monte Carlo block size; sub-seeds are keyed by block index


@dataclass(frozen=True)
class ModelConfig:
    prime_cutoff: int = 10**4
    series_cutoff: int = 10**5
    mc_samples: int = 10**4
    seed: int = 0
    tolerance: float = 1e-6

    def __post_init__(self):
        if self.prime_cutoff < 2 or self.series_cutoff < 1 or self.mc_samples < 1:
            raise ConfigError(f"invalid model configuration {self}")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")


@dataclass(frozen=True)
class ExpectationResult:
    value: complex
    truncation_bound: float
    P_used: int


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    tail_bound: float
    M_used: int
    sigma: float


def _squarefree_primes(q: int) -> list[int]:
    if q < 1:
        raise DomainError(f"q must be a positive integer, got {q}")
    fac = factorize(q)
    if any(e > 1 for _, e in fac):
        raise DomainError(f"q = {q} is not square-free")
    return [p for p, _ in fac]


def expectation_product(z: complex, q: int, cfg: ModelConfig) -> ExpectationResult:
    """E(X(q) * L(1,X)^z) as a truncated Euler product over p <= prime_cutoff.

    Local factor (1/2)[(1-1/p)^-z + (1+1/p)^-z] away from q, and
    (1/2)[(1-1/p)^-z - (1+1/p)^-z] at p | q.  The reported truncation
    bound |z||z+1|/(P-1) dominates the omitted tail of the log-product
    by the integral test.
    """
    if abs(z) > 50:
        raise DomainError(f"|z| = {abs(z):.3g} beyond the supported range 50")
    q_primes = _squarefree_primes(q)
    P = cfg.prime_cutoff
    if any(p > P for p in q_primes):
        raise ConfigError(f"q = {q} has a prime factor above the cutoff P = {P}")
    ps = sieve_primes(P).primes.astype(np.float64)
    zc = complex(z)
    lo = (1.0 - 1.0 / ps) ** (-zc)
    hi = (1.0 + 1.0 / ps) ** (-zc)
    signs = np.ones(len(ps))
    if q_primes:
        signs[np.isin(ps, np.array(q_primes, dtype=np.float64))] = -1.0
    factors = 0.5 * (lo + signs * hi)
    value = complex(np.prod(factors))
    bound = abs(zc) * abs(zc + 1) / (P - 1)
    return ExpectationResult(value=value, truncation_bound=bound, P_used=P)


def _product_general(z: complex, q_primes: list[int], sigma: float, P: int) -> complex:
    # E(X(q) L(sigma,X)^z) as a product; internal (series tail majorant).
    ps = sieve_primes(P).primes.astype(np.float64)
    x = ps**-sigma
    zc = complex(z)
    lo = (1.0 - x) ** (-zc)
    hi = (1.0 + x) ** (-zc)
    signs = np.ones(len(ps))
    if q_primes:
        signs[np.isin(ps, np.array(q_primes, dtype=np.float64))] = -1.0
    return complex(np.prod(0.5 * (lo + signs * hi)))


def _dz_qm2_table(z: complex, q_primes: list[int], m_max: int) -> np.ndarray:
    """T[m] = d_z(q * m^2) for 1 <= m <= m_max, built multiplicatively.

    The slice-update at p^a multiplies by the local ratio
    d_z(p^(2a+eps)) / d_z(p^(2a-2+eps)); once a local value hits zero all
    higher powers are zero too, so a zero ratio is safe.
    """
    T = np.ones(m_max + 1, dtype=np.complex128)
    T[0] = 0.0
    qset = set(q_primes)
    for p in sieve_primes(max(m_max, 2)).primes.tolist():
        if p > m_max:
            break
        eps = 1 if p in qset else 0
        if eps:
            T *= divisor_z_local(z, 1)
        prev = divisor_z_local(z, eps)
        pk = p
        a = 1
        while pk <= m_max:
            cur = divisor_z_local(z, 2 * a + eps)
            ratio = cur / prev if prev != 0 else 0.0
            T[pk::pk] *= ratio
            prev = cur
            pk *= p
            a += 1
    for p in qset:
        if p > m_max:
            T *= divisor_z_local(z, 1)
    return T


def expectation_series(z: complex, q: int, sigma: float, cfg: ModelConfig) -> SeriesResult:
    """E(X(q) * L(sigma,X)^z) as the partial series sum over m <= series_cutoff.

    Terms are d_z(q m^2) / (q m^2)^sigma.  The omitted tail is bounded by
    the same partial sum of the d_k majorant (k = floor(|z|) + 1) measured
    against its closed product form; the call refuses configurations whose
    bound exceeds cfg.tolerance.
    """
    if not 0.5 < sigma <= 1.0:
        raise DomainError(f"sigma must lie in (1/2, 1], got {sigma}")
    if abs(z) > 50:
        raise DomainError(f"|z| = {abs(z):.3g} beyond the supported range 50")
    q_primes = _squarefree_primes(q)
    if any(p > cfg.prime_cutoff for p in q_primes):
        raise ConfigError(f"q = {q} has a prime factor above the cutoff P = {cfg.prime_cutoff}")
    M = cfg.series_cutoff
    m = np.arange(1, M + 1, dtype=np.float64)
    w = float(q) ** (-sigma) * m ** (-2.0 * sigma)
    value = complex(np.sum(_dz_qm2_table(z, q_primes, M)[1:] * w))

    # Majorant tail: sum_{m>M} d_k(q m^2) (q m^2)^-sigma, evaluated as the
    # product-form total minus the same partial sum, plus the product's own
    # truncation slack.
    k = math.floor(abs(z)) + 1
    P = max(cfg.prime_cutoff, 10**6)
    total_k = _product_general(k, q_primes, sigma, P).real
    partial_k = float(np.sum(_dz_qm2_table(k, q_primes, M)[1:].real * w))
    if sigma == 1.0:
        prod_slack = k * (k + 1) / (P - 1)
    else:
        prod_slack = k * (k + 1) * P ** (1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0)
    tail = max(total_k - partial_k, 0.0) + prod_slack
    if tail > cfg.tolerance:
        raise ConvergenceError(
            f"series tail bound {tail:.3e} exceeds tolerance {cfg.tolerance:.3e} at M={M}"
        )
    return SeriesResult(value=value, tail_bound=tail, M_used=M, sigma=sigma)


def _log_factor_coefficients(P: int) -> tuple[float, np.ndarray]:
    ps = sieve_primes(P).primes.astype(np.float64)
    c_plus = -np.log1p(-1.0 / ps)  # X(p) = +1
    c_minus = -np.log1p(1.0 / ps)  # X(p) = -1
    return float(np.sum(c_minus)), c_plus - c_minus


def sample_L1(cfg: ModelConfig, force_sign: int | None = None, threads: int = 1) -> np.ndarray:
    """Monte Carlo stream of L(1,X) truncated at prime_cutoff; reproducible from seed.

    Samples are generated in fixed-size blocks whose sub-seeds depend only
    on (seed, block index), so the stream is bit-identical for any thread
    count.  force_sign = +-1 pins every X(p) (test hook for the extreme
    truncated values).
    """
    base, delta = _log_factor_coefficients(cfg.prime_cutoff)
    n = cfg.mc_samples
    if force_sign is not None:
        if force_sign not in (1, -1):
            raise DomainError("force_sign must be +1 or -1")
        log_val = base + (float(np.sum(delta)) if force_sign == 1 else 0.0)
        return np.full(n, math.exp(log_val))
    out = np.empty(n, dtype=np.float64)
    nblocks = (n + _BLOCK - 1) // _BLOCK

    def fill(b: int) -> None:
        lo = b * _BLOCK
        hi = min(lo + _BLOCK, n)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(b,)))
        signs = rng.integers(0, 2, size=(hi - lo, len(delta)), dtype=np.int8)
        out[lo:hi] = np.exp(base + signs.astype(np.float64) @ delta)

    if threads <= 1 or nblocks < 2:
        for b in range(nblocks):
            fill(b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(fill, range(nblocks)))
    return out


@dataclass(frozen=True)
class TailEstimate:
    tau: float
    side: str
    estimate: float
    std_error: float
    n_samples: int
    note: str | None = None


def tail_thresholds(tau: float) -> tuple[float, float]:
    """(upper, lower) event thresholds: L >= e^gamma*tau and L <= zeta(2)/(e^gamma*tau)."""
    up = math.exp(EULER_GAMMA) * tau
    return up, (math.pi**2 / 6.0) / up


def tail_prob(
    tau: float, side: str, cfg: ModelConfig, samples: np.ndarray | None = None
) -> TailEstimate:
    """Empirical tail frequency with binomial standard error.

    Passing a precomputed sample stream lets several tau values share one
    Monte Carlo run (the CLI and the acceptance suite do this).
    """
    if tau < 1:
        raise DomainError(f"tau must be >= 1, got {tau}")
    if side not in ("upper", "lower"):
        raise DomainError(f"side must be 'upper' or 'lower', got {side!r}")
    if cfg.mc_samples < 10**4 and samples is None:
        raise ConfigError("tail estimation needs mc_samples >= 10^4")
    if samples is None:
        samples = sample_L1(cfg)
    thr_up, thr_lo = tail_thresholds(tau)
    hits = int(np.count_nonzero(samples >= thr_up if side == "upper" else samples <= thr_lo))
    n = len(samples)
    est = hits / n
    se = math.sqrt(est * (1.0 - est) / n)
    note = None
    if hits == 0:
        note = f"0 hits in {n} samples; one-sided 95% upper bound {3.0 / n:.3e}"
    return TailEstimate(tau=tau, side=side, estimate=est, std_error=se, n_samples=n, note=note)


def tails_table(taus: list[float], cfg: ModelConfig, threads: int = 1) -> list[TailEstimate]:
    """Upper and lower tail estimates for every tau, sharing one sample stream."""
    samples = sample_L1(cfg, threads=threads)
    rows = []
    for tau in taus:
        rows.append(tail_prob(tau, "upper", cfg, samples=samples))
        rows.append(tail_prob(tau, "lower", cfg, samples=samples))
    return rows


def export_tails_csv(rows: list[TailEstimate], cfg: ModelConfig, fh) -> None:
    """CSV columns tau,side,estimate,std_error,samples,P."""
    fh.write("tau,side,estimate,std_error,samples,P\n")
    for r in rows:
        fh.write(
            f"{r.tau:.6g},{r.side},{r.estimate:.10g},{r.std_error:.6g},{r.n_samples},{cfg.prime_cutoff}\n"
        )
