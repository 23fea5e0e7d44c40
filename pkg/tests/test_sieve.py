import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from medfactor.errors import DomainError
from medfactor.sieve import (
    FactorizationView,
    SegmentPlan,
    check_nu,
    dump_factorizations,
    factorize,
    iter_segments,
    middle_prime,
    nu_count_restricted,
    primes_up_to,
    read_prime_cache,
    sieve_segment,
    stream_factorizations,
    write_prime_cache,
)
from oracles import naive_factor, naive_middle, naive_primes


def test_primes_up_to_small():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_up_to(1).size == 0
    assert primes_up_to(2).tolist() == [2]
    assert primes_up_to(2000).tolist() == naive_primes(2000)


def test_prime_counts():
    # pi(10^k)
    assert [primes_up_to(10**k).size for k in range(1, 8)] == [4, 25, 168, 1229, 9592, 78498, 664579]


def test_primes_read_only():
    p = primes_up_to(100)
    with pytest.raises(ValueError):
        p[0] = 4


def test_prime_cache_roundtrip(tmp_path, monkeypatch):
    path = tmp_path / "primes.bin"
    write_prime_cache(path, primes_up_to(10**5))
    back = read_prime_cache(path)
    assert np.array_equal(back, primes_up_to(10**5))


def test_check_nu():
    assert check_nu("omega") == "omega"
    with pytest.raises(ValueError):
        check_nu("Omega2")


@pytest.mark.parametrize(
    "n, factors",
    [
        (2, ((2, 1),)),
        (12, ((2, 2), (3, 1))),
        (360, ((2, 3), (3, 2), (5, 1))),
        (97, ((97, 1),)),
        (2**31 - 1, ((2**31 - 1, 1),)),
        (1000003 * 999983, ((999983, 1), (1000003, 1))),
        (600851475143, ((71, 1), (839, 1), (1471, 1), (6857, 1))),
    ],
)
def test_factorize_examples(n, factors):
    f = factorize(n)
    assert f.factors == factors
    f.validate()


def test_factorize_domain():
    for bad in (0, 1, -5, 2**63):
        with pytest.raises(DomainError):
            factorize(bad)


def test_factorization_view_helpers():
    f = factorize(360)
    assert (f.omega, f.Omega) == (3, 6)
    assert f.multiset() == [2, 2, 2, 3, 3, 5]
    assert f.format() == "2^3*3^2*5^1"
    with pytest.raises(ValueError):
        FactorizationView(12, ((3, 1), (2, 2))).validate()
    with pytest.raises(ValueError):
        FactorizationView(12, ((2, 1), (3, 1))).validate()


@pytest.mark.parametrize(
    "n, m_omega, m_Omega",
    [(2, 2, 2), (4, 2, 2), (6, 2, 2), (12, 2, 2), (30, 3, 3), (72, 2, 2), (90, 3, 3), (2 * 3 * 5 * 7, 3, 3),
     (2**5 * 3, 2, 2), (3 * 5**4, 3, 5)],
)
def test_middle_prime_examples(n, m_omega, m_Omega):
    f = factorize(n)
    assert middle_prime(f, "omega") == m_omega
    assert middle_prime(f, "Omega") == m_Omega


def test_nu_count_restricted():
    f = factorize(2**3 * 3**2 * 5 * 11)
    assert nu_count_restricted(f, "omega", (3, 7)) == 2
    assert nu_count_restricted(f, "Omega", (3, 7)) == 3
    assert nu_count_restricted(f, "Omega", (2, 100)) == f.Omega
    assert nu_count_restricted(f, "omega", (13, 100)) == 0
    with pytest.raises(ValueError):
        nu_count_restricted(f, "omega", (5, 3))


def _segment_matches_oracle(lo, hi, segment_size):
    plan = SegmentPlan(lo, hi, segment_size)
    n = lo
    for seg in iter_segments(plan):
        mo, mO = seg.middle_primes("omega"), seg.middle_primes("Omega")
        for i, view in enumerate(seg.views()):
            ref = naive_factor(n)
            assert view.n == n
            assert view.multiset() == ref
            assert mo[i] == naive_middle(n, "omega")
            assert mO[i] == naive_middle(n, "Omega")
            n += 1
    assert n == hi


def test_sieve_matches_trial_division_to_1e5():
    _segment_matches_oracle(2, 10**5 + 1, 1 << 14)


def test_sieve_matches_trial_division_far_window():
    _segment_matches_oracle(10**9, 10**9 + 2000, 512)


def test_segment_arrays_consistent():
    plan = SegmentPlan(2, 5000, 777)
    for seg in iter_segments(plan):
        assert np.array_equal(seg.omega, [v.omega for v in seg.views()])
        assert np.array_equal(seg.Omega, [v.Omega for v in seg.views()])
        rc = seg.restricted_count("Omega", 3, 50)
        assert rc.tolist() == [nu_count_restricted(v, "Omega", (3, 50)) for v in seg.views()]


@settings(max_examples=40, deadline=None)
@given(lo=st.integers(2, 10**7), size=st.integers(1, 600), seg=st.integers(1, 300))
def test_segment_size_invariance(lo, size, seg):
    hi = lo + size
    base = primes_up_to(math.isqrt(hi - 1))
    whole = sieve_segment(lo, hi, base)
    parts = [sieve_segment(a, b, base) for a, b in SegmentPlan(lo, hi, seg, base).segments()]
    for nu in ("omega", "Omega"):
        assert np.array_equal(whole.middle_primes(nu), np.concatenate([p.middle_primes(nu) for p in parts]))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 10**12))
def test_middle_prime_properties(n):
    f = factorize(n)
    f.validate()
    lo, hi = f.factors[0][0], f.factors[-1][0]
    for nu in ("omega", "Omega"):
        assert lo <= middle_prime(f, nu) <= hi
    if all(k == 1 for _, k in f.factors):
        assert f.omega == f.Omega
        assert middle_prime(f, "omega") == middle_prime(f, "Omega")


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10**6))
def test_prime_is_own_middle(k):
    p = int(primes_up_to(10**6)[k % 78498])
    f = factorize(p)
    assert middle_prime(f, "omega") == middle_prime(f, "Omega") == p


@pytest.mark.parametrize("workers", [1, 4])
def test_stream_factorizations_visits_each_once(workers):
    seen = {}
    stream_factorizations(SegmentPlan(2, 3001, 256), lambda v: seen.setdefault(v.n, v.format()), workers)
    assert sorted(seen) == list(range(2, 3001))
    assert seen[360] == "2^3*3^2*5^1"


def test_dump_factorizations():
    buf = io.StringIO()
    dump_factorizations(SegmentPlan(2, 13, 5), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,factorization"
    assert lines[11] == "12,2^2*3^1"
    assert len(lines) == 12


def test_segment_plan_domain():
    with pytest.raises(DomainError):
        SegmentPlan(1, 10)
    with pytest.raises(DomainError):
        SegmentPlan(10, 10)
    with pytest.raises(ValueError):
        SegmentPlan(2, 10, 0)
