import math
from fractions import Fraction

import numpy as np
import pytest

from sievekit.arith import primes_up_to, small_primes
from sievekit.problem import (
    ResidueSystem,
    SiftingDensity,
    build_problem,
    count_in_class,
    exact_sift,
    factor_count_sieve,
    problem_from_config,
)


@pytest.fixture(scope="module")
def table():
    return primes_up_to(10**5 + 2)


def brute_sift(values, z, d=1):
    """Independent oracle: pure-python divisibility scan."""
    count = 0
    zp = [p for p in range(2, z) if all(p % q for q in range(2, p))]
    for v in values:
        if v % d:
            continue
        if all(v % p for p in zp):
            count += 1
    return count


def test_interval_builder_matches_stated_shape():
    prob = build_problem("interval", {"x": 30, "y": 30})
    assert prob.X == 30
    assert list(prob.values()) == list(range(1, 31))
    assert prob.density.omega(7) == 1


def test_twin_builder_densities():
    prob = build_problem("twin", {"x": 100})
    assert prob.density.omega(2) == 1
    assert prob.density.omega(3) == 2
    assert prob.X == 100
    assert prob.size == 97
    assert list(prob.values())[:3] == [3, 8, 15]


def test_shifted_prime_builder(table):
    prob = build_problem("shifted_prime", {"x": 100}, table=table)
    assert prob.density.omega(3) == Fraction(3, 2)
    assert prob.density.omega(2) == 0
    from sievekit.arith import li

    assert float(prob.X) == pytest.approx(li(100))
    assert list(prob.values())[:4] == [5, 7, 9, 13]


def test_goldbach_builder():
    prob = build_problem("goldbach", {"N": 100})
    assert prob.density.omega(2) == 1
    assert prob.density.omega(5) == 1
    assert prob.density.omega(3) == 2
    assert prob.size == 95


def test_progression_builder():
    prob = build_problem("progression", {"x": 100, "k": 4, "l": 1})
    vals = prob.values()
    assert vals[0] == 1 and vals[-1] == 97 and len(vals) == 25
    assert prob.density.omega(2) == 0
    assert prob.X == 25
    with pytest.raises(ValueError):
        build_problem("progression", {"x": 100, "k": 4, "l": 2})


def test_parity_builder():
    prob = build_problem("parity", {"x": 20, "r": 0})
    # parity 0: 1 and numbers with an even count of prime divisors (multiplicity)
    assert list(prob.values()) == [1, 4, 6, 9, 10, 14, 15, 16]
    odd = build_problem("parity", {"x": 20, "r": 1})
    assert set(odd.values()) | set(prob.values()) == set(range(1, 20))


def test_factor_count_sieve():
    omega = factor_count_sieve(32)
    assert omega[1] == 0 and omega[2] == 1 and omega[12] == 3 and omega[16] == 4 and omega[30] == 3


def test_count_in_class_examples():
    prob = build_problem("interval", {"x": 30, "y": 30})
    count, rem = count_in_class(prob, 6)
    assert count == 5 and rem == 0

    twin = build_problem("twin", {"x": 100})
    count, rem = count_in_class(twin, 3)
    assert count == 65
    assert rem == Fraction(65) - Fraction(200, 3)

    count, rem = count_in_class(twin, 1)
    assert count == 97 and rem == 97 - 100


def test_count_in_class_matches_enumeration():
    for kind, params in [
        ("twin", {"x": 500}),
        ("goldbach", {"N": 300}),
        ("interval", {"x": 400, "y": 250}),
        ("progression", {"x": 500, "k": 5, "l": 2}),
    ]:
        prob = build_problem(kind, params)
        vals = prob.values()
        for d in (1, 2, 3, 5, 6, 7, 15, 21, 35, 105):
            direct = int(np.count_nonzero(vals % d == 0))
            assert prob.count_multiple(d) == direct, (kind, d)


def test_remainder_magnitudes():
    interval = build_problem("interval", {"x": 997, "y": 600})
    twin = build_problem("twin", {"x": 1000})
    for d in (2, 3, 5, 6, 10, 15, 30, 7, 21, 35, 105):
        _, rem = count_in_class(interval, d)
        assert abs(rem) <= 1
        count, rem = count_in_class(twin, d)
        omega_d = twin.density.omega_d([p for p in (2, 3, 5, 7) if d % p == 0])
        # with the declared scale X = x the 3-element length slack leaks into
        # R_d; the crisp bound |R_d| <= omega(d) holds for the matched scale
        assert abs(rem) <= omega_d * (1 + Fraction(3, d))
        matched = Fraction(count) - omega_d / d * twin.size
        assert abs(matched) <= omega_d


def test_exact_sift_examples(table):
    prob = build_problem("interval", {"x": 30, "y": 30})
    assert exact_sift(prob, 6) == 8  # phi(30)

    twin = build_problem("twin", {"x": 100})
    assert exact_sift(twin, 2) == 97

    big = build_problem("interval", {"x": 100, "y": 100})
    assert exact_sift(big, 11) == 22  # 1 plus the 21 primes in [11, 100)


def test_exact_sift_against_pure_python():
    for kind, params in [
        ("twin", {"x": 300}),
        ("goldbach", {"N": 200}),
        ("interval", {"x": 500, "y": 499}),
        ("parity", {"x": 300, "r": 1}),
    ]:
        prob = build_problem(kind, params)
        for z in (2, 3, 7, 13, 30):
            assert exact_sift(prob, z) == brute_sift(prob.values(), z), (kind, z)


def test_sift_count_in_class_oracle():
    prob = build_problem("twin", {"x": 500})
    vals = prob.values()
    for d_primes, w in [((7,), 7), ((11, 7), 5), ((13,), 13), ((), 11)]:
        d = math.prod(d_primes)
        assert prob.sift_count(w, d_primes) == brute_sift(vals, w, d)


def test_exact_sift_nonincreasing_in_z():
    prob = build_problem("goldbach", {"N": 1000})
    counts = [exact_sift(prob, z) for z in range(2, 40)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_omega_form_agrees_with_product_form():
    # affine kinds: residue-class sifting of the index interval must count
    # exactly the same survivors as divisibility sifting of the values
    for kind, params in [
        ("twin", {"x": 1000}),
        ("goldbach", {"N": 1000}),
        ("interval", {"x": 2000, "y": 1500}),
        ("progression", {"x": 2000, "k": 7, "l": 3}),
    ]:
        prob = build_problem(kind, params)
        form = prob.omega_form()
        for z in (2, 3, 5, 11, 23, 31, 47, 50):
            assert form.sift_count(z) == exact_sift(prob, z), (kind, z)


def test_residue_system_counting():
    rs = ResidueSystem({2: (0,), 3: (0, 1), 5: (2,)})
    assert rs.size(3) == 2 and rs.size(7) == 0
    assert sorted(rs.roots_mod((2, 3))) == [0, 4]  # even n with n mod 3 in {0, 1}
    count = rs.count_in_interval(0, 30, (2, 3))
    direct = sum(1 for n in range(30) if n % 2 == 0 and n % 3 in (0, 1))
    assert count == direct


def test_interval_residue_counts_match_divisibility():
    prob = build_problem("interval", {"x": 2000, "y": 1500})
    form = prob.omega_form()
    for d_primes in [(2,), (3,), (2, 3), (5, 7), (2, 3, 5), (11,)]:
        d = math.prod(d_primes)
        via_residues = form.residues.count_in_interval(form.M, form.N, d_primes)
        assert via_residues == prob.count_multiple(d), d_primes


def test_residue_system_validation():
    with pytest.raises(ValueError):
        ResidueSystem({3: (0, 1, 2)})
    with pytest.raises(ValueError):
        ResidueSystem({3: (3,)})


def test_density_validation():
    dens = SiftingDensity(lambda p: Fraction(p), 1.0)
    with pytest.raises(ValueError):
        dens.omega(3)


def test_config_round_trip():
    prob = build_problem("progression", {"x": 100, "k": 4, "l": 1})
    cfg = prob.to_config()
    assert cfg == {"kind": "progression", "x": 100, "k": 4, "l": 1}
    again = problem_from_config(cfg)
    assert np.array_equal(again.values(), prob.values())


def test_custom_problem():
    prob = build_problem("custom", {"elements": [5, 7, 11, 25], "X": 4})
    assert exact_sift(prob, 3) == 4
    assert exact_sift(prob, 6) == 2
    assert prob.count_multiple(5) == 2
