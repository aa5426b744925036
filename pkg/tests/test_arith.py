import math

import mpmath
import numpy as np
import pytest

from sievekit.arith import (
    BudgetError,
    euler_phi,
    factor_squarefree,
    li,
    mean_remainder_sum,
    mobius,
    pi_count,
    primes_up_to,
    primes_up_to_simple,
    remainder_E,
    truncated_mobius,
)


def trial_division_primes(limit):
    """Independent oracle: primes below limit by bare trial division."""
    out = []
    for n in range(2, limit):
        if all(n % d for d in range(2, math.isqrt(n) + 1)):
            out.append(n)
    return out


@pytest.fixture(scope="module")
def table():
    return primes_up_to(10**5 + 2)


def test_primes_smallest_cases():
    assert list(primes_up_to(3).primes) == [2]
    assert list(primes_up_to(2).primes) == []
    assert primes_up_to(2).limit == 2


def test_primes_up_to_100_against_trial_division():
    t = primes_up_to(100)
    assert list(t.primes) == trial_division_primes(100)
    assert len(t.primes) == 25 and t.primes[-1] == 97


def test_membership_matches_primes(table):
    assert np.array_equal(np.nonzero(table.membership)[0], table.primes)
    assert 97 in table and 91 not in table


def test_segmented_agrees_with_simple_to_1e7():
    seg = primes_up_to(10**7)
    plain = primes_up_to_simple(10**7)
    assert np.array_equal(seg.membership, plain.membership)
    assert np.array_equal(seg.primes, plain.primes)


def test_budget_guard():
    with pytest.raises(BudgetError):
        primes_up_to(10**7, cap=10**6)


def mobius_oracle(n):
    if n == 1:
        return 1
    sign, m = 1, n
    for p in range(2, n + 1):
        if p * p > m:
            break
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            sign = -sign
    if m > 1:
        sign = -sign
    return sign


def test_mobius_small_values():
    assert mobius(1) == 1
    assert mobius(12) == 0
    assert mobius(30) == -1


def test_mobius_against_oracle_to_1e5():
    for n in range(1, 10**5 + 1):
        assert mobius(n) == mobius_oracle(n), n


def test_truncated_mobius_examples():
    m = factor_squarefree(30)
    assert truncated_mobius(m, 0) == 1
    assert truncated_mobius(m, 1) == -2
    assert truncated_mobius(m, 3) == 0


def test_truncated_mobius_identity_exhaustive():
    # truncated sum equals (-1)^ell * C(nu - 1, ell) for all squarefree m <= 1e4
    for n in range(2, 10**4 + 1):
        if mobius(n) == 0:
            continue
        m = factor_squarefree(n)
        for ell in range(m.nu + 1):
            expected = (-1) ** ell * math.comb(m.nu - 1, ell)
            # independent route: enumerate divisors directly
            direct = 0
            for bits in range(1 << m.nu):
                if bin(bits).count("1") <= ell:
                    direct += (-1) ** bin(bits).count("1")
            assert truncated_mobius(m, ell) == expected == direct


def test_factor_squarefree_rejects_squares():
    with pytest.raises(ValueError):
        factor_squarefree(12)


def test_pi_count_variants(table):
    assert pi_count(table, 100) == 25
    # twin pairs below 100: (3,5),(5,7),(11,13),(17,19),(29,31),(41,43),(59,61),(71,73)
    assert pi_count(table, 100, "twin") == 8
    assert pi_count(table, 100, "progression", k=4, l=1) == 11
    assert pi_count(table, 1000, "twin") == 35
    assert pi_count(table, 10**4, "twin") == 205


def test_pi_progression_partition(table):
    # classes coprime to k partition the primes not dividing k
    for k in (3, 4, 10, 12):
        total = sum(
            pi_count(table, 10**4, "progression", k=k, l=l)
            for l in range(k)
            if math.gcd(k, l) == 1
        )
        small = sum(1 for p in (2, 3, 5, 7, 11) if k % p == 0 and p < 10**4)
        assert total == pi_count(table, 10**4) - small


def test_li_against_mpmath():
    # mpmath's offset li is the independent quadrature oracle
    for x in (10, 100, 1000, 10**5):
        assert li(x) == pytest.approx(float(mpmath.li(x, offset=True)), abs=1e-6)
    assert li(2) == 0.0


def test_remainder_E_conventions(table):
    # k = 1 is the degenerate full sequence with phi(1) = 1
    assert remainder_E(table, 1000, 1, 0) == pytest.approx(168 - li(1000), abs=1e-12)
    with pytest.raises(ValueError):
        remainder_E(table, 100, 4, 2)
    e = remainder_E(table, 100, 4, 1)
    assert e == pytest.approx(11 - li(100) / 2, abs=1e-9)


def test_remainder_E_recount(table):
    x = 10**5
    count = pi_count(table, x, "progression", k=3, l=1)
    e = remainder_E(table, x, 3, 1)
    assert abs(e - (count - li(x) / 2)) < 0.5
    assert e == pytest.approx(-(li(x) / 2 - count), abs=1e-9)


def test_mean_remainder_sum(table):
    assert mean_remainder_sum(table, 1000, 2) == pytest.approx(abs(168 - li(1000)), abs=1e-9)
    val = mean_remainder_sum(table, 10**4, 10)
    assert val > 0
    # degenerate regime: moduli at and above x still contribute finite rows
    assert math.isfinite(mean_remainder_sum(table, 100, 100))
    with pytest.raises(BudgetError):
        mean_remainder_sum(table, 10**5, 10**4, work_cap=10**6)


def test_euler_phi():
    assert [euler_phi(n) for n in (1, 2, 6, 10, 97)] == [1, 1, 2, 4, 96]
