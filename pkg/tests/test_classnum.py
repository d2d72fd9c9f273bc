import io
import math

import numpy as np
import pytest

from pdl import cache, classnum
from pdl.arith import log_integral, sieve_primes
from pdl.errors import CacheError, DomainError, InsufficientSweepError

from conftest import naive_primes
from test_arith import kron_ref


# ------------------------------------------------------------ reduced forms

def test_class_number_forms_examples():
    assert classnum.class_number_forms(-3) == 1
    assert classnum.class_number_forms(-23) == 3
    assert classnum.class_number_forms(-47) == 5
    assert classnum.class_number_forms(-163) == 1
    assert classnum.class_number_forms(-4) == 1
    assert classnum.class_number_forms(-8) == 1


def test_reduced_forms_enumeration_content():
    triples = {(f.a, f.b, f.c) for f in classnum.reduced_forms(-23)}
    assert triples == {(1, 1, 6), (2, 1, 3), (2, -1, 3)}
    triples47 = {(f.a, f.b, f.c) for f in classnum.reduced_forms(-47)}
    assert triples47 == {(1, 1, 12), (2, 1, 6), (2, -1, 6), (3, 1, 4), (3, -1, 4)}
    assert {(f.a, f.b, f.c) for f in classnum.reduced_forms(-3)} == {(1, 1, 1)}


def test_reduced_forms_match_scalar_kernel():
    for p in naive_primes(2000):
        if p % 4 == 3:
            assert len(classnum.reduced_forms(-int(p))) == classnum.class_number_forms(-int(p))


def test_forms_domain_errors():
    for bad in (5, 0, -12, -9, -50):  # positive, zero, non-fundamental
        with pytest.raises(DomainError):
            classnum.class_number_forms(bad)


def test_reduced_form_validation():
    with pytest.raises(DomainError):
        classnum.ReducedForm(2, 3, 2)  # |b| > a
    with pytest.raises(DomainError):
        classnum.ReducedForm(2, -2, 3)  # tie rule: |b| = a needs b >= 0
    with pytest.raises(DomainError):
        classnum.ReducedForm(2, 2, 2)  # imprimitive
    f = classnum.ReducedForm(2, 1, 3)
    assert f.discriminant == -23


# ------------------------------------------------------- dirichlet formula

def test_class_number_dirichlet_examples():
    assert classnum.class_number_dirichlet(7) == 1
    assert classnum.class_number_dirichlet(23) == 3
    assert classnum.class_number_dirichlet(11) == 1


def test_dirichlet_domain_errors():
    for bad in (3, 5, 13, 15, 2):
        with pytest.raises(DomainError):
            classnum.class_number_dirichlet(bad)


def test_oracle_equivalence_tables(table_1e5_forms, table_1e5_dirichlet):
    assert np.array_equal(table_1e5_forms.p, table_1e5_dirichlet.p)
    assert np.array_equal(table_1e5_forms.h, table_1e5_dirichlet.h)


def test_genus_parity(table_1e5_forms):
    assert np.all(table_1e5_forms.h % 2 == 1)


# ------------------------------------------------------------------- L(1)

def test_L1_examples():
    assert classnum.L1(-7, 1) == pytest.approx(math.pi / math.sqrt(7), rel=1e-15)
    assert classnum.L1(-23, 3) == pytest.approx(3 * math.pi / math.sqrt(23), rel=1e-15)
    assert classnum.L1(-163, 1) == pytest.approx(math.pi / math.sqrt(163), rel=1e-15)
    assert classnum.L1(-7, 1) == pytest.approx(1.187410, abs=1e-5)
    assert classnum.L1(-23, 3) == pytest.approx(1.965202, abs=1e-5)
    assert classnum.L1(-163, 1) == pytest.approx(0.246069, abs=1e-5)


def test_L1_domain():
    for d in (-3, -4, 7):
        with pytest.raises(DomainError):
            classnum.L1(d, 1)


def test_L1_round_trip(table_1e5_forms):
    t = table_1e5_forms
    for p, h in zip(t.p[1:200].tolist(), t.h[1:200].tolist()):
        val = classnum.L1(-p, h)
        assert val > 0
        assert math.sqrt(p) * val / math.pi == pytest.approx(h, rel=1e-12)


# -------------------------------------------------------------- histogram

def test_histogram_x50():
    hist = classnum.build_histogram(50, "forms")
    assert hist.counts == {1: 5, 3: 2, 5: 1}
    assert hist.total == 8


def test_histogram_x3():
    assert classnum.build_histogram(3, "forms").counts == {1: 1}


def test_histogram_method_consistency(table_1e5_forms, table_1e5_dirichlet, cache_dir):
    hf = classnum.build_histogram(10**5, "forms", cache_dir=cache_dir)
    hd = classnum.build_histogram(10**5, "dirichlet", cache_dir=cache_dir)
    assert hf.counts == hd.counts


def test_histogram_total_matches_sieve(table_1e5_forms):
    n34 = len(sieve_primes(10**5, class_3mod4=True).primes)
    hist = classnum.build_histogram(10**5, "forms")
    assert hist.total == n34 == len(table_1e5_forms.p)
    assert all(k % 2 == 1 for k in hist.counts)


def test_sweep_thread_determinism():
    t1 = classnum.sweep_class_numbers(2 * 10**4, "forms", threads=1)
    t8 = classnum.sweep_class_numbers(2 * 10**4, "forms", threads=8)
    assert np.array_equal(t1.h, t8.h)
    d1 = classnum.sweep_class_numbers(2 * 10**4, "dirichlet", threads=1)
    d8 = classnum.sweep_class_numbers(2 * 10**4, "dirichlet", threads=8)
    assert np.array_equal(d1.h, d8.h)
    assert t1.checksum == t8.checksum == d1.checksum


# ---------------------------------------------------------------- sum odd

def test_sum_odd_F_exact_counts():
    table = classnum.sweep_class_numbers(10**4, "forms")
    assert classnum.sum_odd_F(1, table) == 9
    assert classnum.sum_odd_F(3, table) == 25
    assert classnum.sum_odd_F(0, table) == 0
    assert classnum.sum_odd_F(-5, table) == 0


def test_sum_odd_F_insufficient_sweep():
    table = classnum.sweep_class_numbers(50, "forms")
    with pytest.raises(InsufficientSweepError):
        classnum.sum_odd_F(1, table)
    # opting out still counts what was swept (caller owns the caveat)
    assert classnum.sum_odd_F(1, table, require_coverage=False) == 5 + 2


def test_coverage_bound_scales(table_1e5_forms):
    b1 = classnum.coverage_bound(1, table_1e5_forms)
    b3 = classnum.coverage_bound(3, table_1e5_forms)
    assert b3 == pytest.approx(9 * b1, rel=1e-12)
    assert b1 > 163  # the last h = 1 discriminant must be safely inside


# ------------------------------------------------------------- char sums

def test_char_sum_examples():
    r1 = classnum.char_sum_over_P(100, 1)
    assert r1.value == 13 and r1.n_primes == 13
    assert r1.predicted_main == pytest.approx(log_integral(100) / 2)
    r4 = classnum.char_sum_over_P(100, 4)
    assert r4.value == 13
    r2 = classnum.char_sum_over_P(100, 2)
    ref = sum(kron_ref(-int(p), 2) for p in naive_primes(100) if p % 4 == 3)
    assert r2.value == ref
    assert abs(r2.value) < 13
    assert r2.predicted_main == 0.0


def test_char_sum_against_reference_random_n():
    ps = [int(p) for p in naive_primes(3000) if p % 4 == 3]
    rng = np.random.default_rng(3)
    for n in rng.integers(1, 500, size=12).tolist():
        got = classnum.char_sum_over_P(3000, int(n))
        assert got.value == sum(kron_ref(-p, int(n)) for p in ps)


def test_char_sum_square_case_envelope():
    # square n: the sum tracks Li(x)/2 within a root-x envelope
    x = 10**6
    half_li = log_integral(x) / 2
    for n in (1, 4, 9, 25):
        r = classnum.char_sum_over_P(x, n)
        assert abs(r.value - half_li) <= 3 * math.sqrt(x)
        assert r.predicted_main == pytest.approx(half_li)


def test_char_sum_nonsquare_case_small():
    x = 10**6
    n_primes = len(sieve_primes(x, class_3mod4=True).primes)
    rng = np.random.default_rng(17)
    picked = []
    while len(picked) < 20:
        n = int(rng.integers(2, 1001))
        if classnum.squarefree_part(n) == n and n != 1:
            picked.append(n)
    for n in picked:
        r = classnum.char_sum_over_P(x, n)
        assert abs(r.value) <= 0.05 * n_primes
        assert r.predicted_main == 0.0


# ------------------------------------------------------------- characters

def test_character_table_matches_kronecker():
    chi = classnum.character_table(-23, 500)
    for n in range(501):
        assert chi[n] == kron_ref(-23, n)


@pytest.mark.parametrize("p,h", [(23, 3), (47, 5), (163, 1), (907, 3)])
def test_character_table_L0_identity(p, h):
    # -(1/p) * sum a*chi(a) over a period equals the class number
    chi = classnum.character_table(-p, p)
    a = np.arange(p + 1, dtype=np.float64)
    assert -float(np.sum(a * chi)) / p == pytest.approx(h, abs=1e-9)


# ------------------------------------------------------------------ cache

def test_cache_round_trip(tmp_path):
    table = classnum.sweep_class_numbers(500, "forms", cache_dir=tmp_path)
    path = cache.cache_path(tmp_path, 500, "forms")
    assert path.exists()
    x, method, ps, hs = cache.read_table(path)
    assert x == 500 and method == "forms"
    assert np.array_equal(ps, table.p) and np.array_equal(hs, table.h)
    # warm read returns identical data
    again = classnum.sweep_class_numbers(500, "forms", cache_dir=tmp_path)
    assert np.array_equal(again.h, table.h)
    assert again.checksum == table.checksum


def test_cache_detects_corruption(tmp_path):
    classnum.sweep_class_numbers(500, "dirichlet", cache_dir=tmp_path)
    path = cache.cache_path(tmp_path, 500, "dirichlet")
    blob = bytearray(path.read_bytes())
    blob[30] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(CacheError):
        cache.read_table(path)


def test_cache_rejects_bad_magic(tmp_path):
    path = tmp_path / "junk.pdl"
    path.write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(CacheError):
        cache.read_table(path)


def test_csv_export():
    table = classnum.sweep_class_numbers(50, "forms")
    buf = io.StringIO()
    classnum.export_table_csv(table, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "p,d,h,L1"
    assert lines[1].startswith("3,-3,1,")
    assert lines[5].split(",")[:3] == ["23", "-23", "3"]
    assert float(lines[5].split(",")[3]) == pytest.approx(3 * math.pi / math.sqrt(23))


# ------------------------------------------------------------------ types

def test_prime_discriminant_type():
    pd = classnum.PrimeDiscriminant(23, h=3)
    assert pd.d == -23
    with pytest.raises(DomainError):
        classnum.PrimeDiscriminant(13)
    with pytest.raises(DomainError):
        classnum.PrimeDiscriminant(15)


def test_restrict_beyond_bound(table_1e5_forms):
    with pytest.raises(InsufficientSweepError):
        table_1e5_forms.restrict(10**6)
