"""Exact inclusion-exclusion sieving and density products.

The decomposition splits the exact survivor count into a density main term
``V(z, omega) * X`` and the signed remainder accumulated over squarefree
divisors of the prime product P(z).  Everything is exact rational
arithmetic, so ``total == main + remainder`` holds identically and the
real check is ``total == exact_sift``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import BudgetError, small_primes
from .problem import SieveProblem, SiftingDensity, divisor_walk

EXP_MINUS_EULER = 0.561459483566885  # exp(-Euler constant), Mertens constant
DIVISOR_CAP = 1 << 25


@dataclass(frozen=True)
class SieveDecomposition:
    main: Fraction
    remainder: Fraction
    total: int

    def __post_init__(self):
        assert self.main + self.remainder == self.total


def density_product(density: SiftingDensity, z: int) -> Fraction:
    """V(z, omega) = prod over p < z of (1 - omega(p)/p), exact."""
    if z < 2:
        raise ValueError("z must be >= 2")
    out = Fraction(1)
    for p in small_primes(z):
        out *= 1 - density.omega(p) / p
    return out


def density_product_float(density: SiftingDensity, z: int) -> float:
    """Float-precision V(z, omega) for asymptotic comparisons at large z."""
    if z < 2:
        raise ValueError("z must be >= 2")
    out = 1.0
    for p in small_primes(z):
        out *= 1 - density.omega(p) / p
    return out


def sifting_primes(density: SiftingDensity, z: int) -> list[int]:
    """Primes below z with nonzero density (inert primes never sift)."""
    return [p for p in small_primes(z) if density.omega(p) != 0]


def legendre_decompose(problem: SieveProblem, z: int, *, divisor_cap: int = DIVISOR_CAP) -> SieveDecomposition:
    """Evaluate the exact sieve identity at level z.

    Enumerates squarefree divisors of P(z) with nonzero density (the others
    contribute empty classes), so the count is exact.  Guards the 2^pi(z)
    blowup with ``divisor_cap``.
    """
    primes = sifting_primes(problem.density, z)
    if len(primes) > 25 or (1 << len(primes)) > divisor_cap:
        raise BudgetError(f"2^{len(primes)} divisors of P({z}) exceed the enumeration cap")
    prof = problem.profile() if all(p in problem.profile().index for p in primes) else None
    total = 0
    for d, factors, mu in divisor_walk(primes, cap=divisor_cap):
        count = prof.count_multiple(factors) if prof is not None else problem.count_multiple(d)
        total += mu * count
    main = density_product(problem.density, z) * problem.X
    return SieveDecomposition(main, Fraction(total) - main, total)


def mertens_compare(z: int) -> tuple[float, float, float]:
    """V(z, 1) against exp(-Euler)/log z: (product, asymptotic, relative error)."""
    if z < 10:
        raise ValueError("z must be >= 10")
    product = density_product_float(SiftingDensity.unit(), z)
    asymptotic = EXP_MINUS_EULER / math.log(z)
    return product, asymptotic, abs(product / asymptotic - 1)


def dimension_fit(density: SiftingDensity, z1: int, z2: int) -> float:
    """Empirical sieve dimension from the decay of V between z1 and z2."""
    if not 2 < z1 < z2:
        raise ValueError("need 2 < z1 < z2")
    v1 = density_product_float(density, z1)
    v2 = density_product_float(density, z2)
    if v1 == v2:
        return 0.0
    if v2 == 0:
        raise ValueError("density product vanishes at z2")
    return math.log(v1 / v2) / math.log(math.log(z2) / math.log(z1))
