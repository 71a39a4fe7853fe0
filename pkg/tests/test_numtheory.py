import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primescatter.errors import DomainError, EmptyRequestError
from primescatter.numtheory import (
    chebyshev_psi,
    is_prime,
    log_integral,
    mobius,
    prime_count,
    primes_first,
    riemann_R,
    shift_position,
    sieve,
    von_mangoldt,
)


def naive_sieve(n):
    """Plain-list Eratosthenes, independent of the numpy sieve."""
    flags = [True] * (n + 1)
    flags[0] = flags[1] = False
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            for j in range(i * i, n + 1, i):
                flags[j] = False
    return [i for i, f in enumerate(flags) if f]


@pytest.fixture(scope="module")
def oracle_primes():
    return naive_sieve(1_400_000)


def test_primes_first_small():
    assert list(primes_first(5)) == [2, 3, 5, 7, 11]
    assert list(primes_first(1)) == [2]


def test_primes_first_empty():
    with pytest.raises(EmptyRequestError):
        primes_first(0)


def test_primes_first_large(oracle_primes):
    seq = primes_first(100_000)
    assert len(seq) == 100_000
    assert seq.last == 1299709
    assert seq.last == oracle_primes[99_999]
    assert np.array_equal(seq.values, np.array(oracle_primes[:100_000]))


def test_prime_count_examples():
    assert prime_count(1.9) == 0
    assert prime_count(11) == 5
    assert prime_count(1e6) == 78498
    with pytest.raises(DomainError):
        prime_count(-1)


def test_prime_count_agrees_with_primes(oracle_primes):
    ps = np.array([p for p in oracle_primes if p <= 1_000_000])
    # count at every prime equals its 1-based index
    full = sieve(1_000_000)
    assert np.array_equal(np.searchsorted(full, ps, side="right"), np.arange(1, ps.size + 1))
    for i in (0, 1, 500, 9999, ps.size - 1):
        assert prime_count(ps[i]) == i + 1


def test_mobius_examples():
    assert mobius(1) == 1
    assert mobius(6) == 1
    assert mobius(12) == 0
    assert mobius(30) == -1
    with pytest.raises(DomainError):
        mobius(0)


def test_von_mangoldt_examples():
    assert von_mangoldt(8) == pytest.approx(0.693147, abs=1e-6)
    assert von_mangoldt(6) == 0
    assert von_mangoldt(7) == pytest.approx(1.945910, abs=1e-6)
    assert von_mangoldt(1) == 0


def test_divisor_identities():
    N = 10_000
    mu = [0] + [mobius(n) for n in range(1, N + 1)]
    lam = [0.0] + [von_mangoldt(n) for n in range(1, N + 1)]
    mu_sum = [0] * (N + 1)
    lam_sum = [0.0] * (N + 1)
    for d in range(1, N + 1):
        for m in range(d, N + 1, d):
            mu_sum[m] += mu[d]
            lam_sum[m] += lam[d]
    assert mu_sum[1] == 1
    assert all(v == 0 for v in mu_sum[2:])
    assert max(abs(lam_sum[n] - math.log(n)) for n in range(1, N + 1)) < 1e-9


@pytest.mark.parametrize("x, expected", [(2, 1.0451637801), (10, 6.1655995048)])
def test_log_integral_values(x, expected):
    assert log_integral(x) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("x", [0.01, 0.3, 0.9, 0.999, 1.001, 1.5, 3.7, 100.0, 1e6])
def test_log_integral_vs_mpmath(x):
    assert log_integral(x) == pytest.approx(float(mpmath.li(x)), rel=1e-10)


@pytest.mark.parametrize("x", [0, -1, 1])
def test_log_integral_domain(x):
    with pytest.raises(DomainError):
        log_integral(x)


def test_log_integral_difference_vanishes():
    assert log_integral(2) - log_integral(2) == 0


def _truncated_R(x, n_terms):
    # mpmath oracle for the same truncated series
    mpmath.mp.dps = 30
    total = mpmath.mpf(0)
    for n in range(1, n_terms + 1):
        mu = mobius(n)
        if mu:
            total += mpmath.mpf(mu) / n * mpmath.li(mpmath.mpf(x) ** (mpmath.mpf(1) / n))
    return float(total)


@pytest.mark.parametrize("x, terms", [(100, 20), (1e4, 30), (1000, 30)])
def test_riemann_R_truncated(x, terms):
    res = riemann_R(x, terms)
    assert res.value == pytest.approx(_truncated_R(x, terms), rel=1e-10)
    assert res.terms_used == terms
    assert res.last_term != 0


def test_riemann_R_single_term():
    assert riemann_R(2, 1).value == pytest.approx(1.04516, abs=1e-5)


def test_riemann_R_reference_values():
    # 20 terms of the series, which is not yet the full R(100) = 25.6616
    assert riemann_R(100, 20).value == pytest.approx(25.6942, abs=1e-4)
    assert riemann_R(1e4, 30).value == pytest.approx(1226.94, abs=0.01)


@pytest.mark.parametrize("x", [100, 1000, 10_000])
def test_riemann_R_close_to_pi(x):
    assert abs(riemann_R(x, 30).value - prime_count(x)) < 3


def test_riemann_R_domain():
    with pytest.raises(DomainError):
        riemann_R(1, 10)


def test_riemann_R_stops_near_one():
    # x^(1/n) < 1 + 1e-6 from n ~ 7e5 onwards for x = 2
    res = riemann_R(2.0, 10**7)
    assert res.terms_used < 10**7


def _psi_oracle(x):
    return math.fsum(von_mangoldt(n) for n in range(1, math.floor(x) + 1))


def test_chebyshev_psi_examples():
    assert chebyshev_psi(1.5) == 0
    expected10 = 3 * math.log(2) + 2 * math.log(3) + math.log(5) + math.log(7)
    assert chebyshev_psi(10) == pytest.approx(expected10, abs=1e-12)
    assert chebyshev_psi(10) == pytest.approx(7.8320, abs=1e-4)
    assert chebyshev_psi(100) == pytest.approx(_psi_oracle(100), abs=1e-10)
    assert chebyshev_psi(100) == pytest.approx(94.045, abs=1e-3)


def test_chebyshev_psi_jumps_at_prime_powers():
    vals = np.array([chebyshev_psi(n) for n in range(1, 300)])
    jumps = np.diff(vals)
    assert np.all(jumps >= 0)
    for n in range(2, 300):
        lam = von_mangoldt(n)
        assert jumps[n - 2] == pytest.approx(lam, abs=1e-9)
        assert (jumps[n - 2] > 0) == (lam > 0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1.0, max_value=2000.0), st.floats(min_value=0.0, max_value=50.0))
def test_chebyshev_psi_nondecreasing(x, dx):
    assert chebyshev_psi(x + dx) >= chebyshev_psi(x)


def test_shift_position_examples():
    assert shift_position(11) == pytest.approx(2.2)
    assert shift_position(2) == 2
    assert shift_position(1299709) == pytest.approx(12.99709)
    with pytest.raises(DomainError):
        shift_position(12)


def test_shift_position_near_log(oracle_primes):
    ps = np.array([p for p in oracle_primes if 100 <= p <= 1_000_000], dtype=float)
    idx = np.searchsorted(np.array(oracle_primes), ps) + 1
    assert np.max(np.abs(ps / idx - np.log(ps))) <= 1.3
    for p in (101, 7919, 999983):
        assert abs(shift_position(p) - math.log(p)) <= 1.3


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=100_000))
def test_is_prime_matches_sieve(n):
    assert is_prime(n) == (n in set(sieve(max(n, 2)).tolist()[-3:]) or bool(np.isin(n, sieve(n))))
