"""Sieve-problem data model: sequences, densities, residue systems, oracles.

A :class:`SieveProblem` packages a finite integer sequence ``A`` together
with its multiplicative density ``omega``, a scale ``X`` and (for affine
kinds) an equivalent residue-class description.  ``exact_sift`` is the
brute-force oracle every bound in the package is compared against.

Supported kinds:

* ``interval``       n in (x-y, x],                    omega = 1, X = y
* ``twin``           n(n+2) for 1 <= n < x-2,          omega(2)=1, omega(p)=2, X = x
* ``goldbach``       n(N-n) for 3 <= n <= N-3,         omega(p)=2 (p not | N) else 1, X = N
* ``shifted_prime``  p+2 for odd primes p < x,         omega(2)=0, omega(p)=p/(p-1), X = li(x)
* ``progression``    n < x with n = l (mod k),         omega(p)=0 for p|k else 1, X = x/k
* ``parity``         n < x, total prime divisors = r,  omega = 1, X = x/2
* ``custom``         explicit elements + density
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .arith import BudgetError, PrimeTable, factorize, li, primes_up_to_simple, small_primes

KINDS = ("interval", "twin", "goldbach", "shifted_prime", "progression", "parity", "custom")

ORACLE_ELEMENT_CAP = 2 * 10**7
_PROFILE_Z = 53  # oracle profiles cover sifting primes below this bound


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class SiftingDensity:
    """Multiplicative density: omega(p) removed residue classes per prime p.

    ``kappa`` is the declared dimension.  omega extends multiplicatively to
    squarefree d; values are exact rationals.
    """

    def __init__(self, rule: Callable[[int], Fraction], kappa: float):
        self._rule = rule
        self.kappa = kappa
        self._memo: dict[int, Fraction] = {}

    def omega(self, p: int) -> Fraction:
        w = self._memo.get(p)
        if w is None:
            w = _as_fraction(self._rule(p))
            if not 0 <= w < p:
                raise ValueError(f"omega({p}) = {w} violates 0 <= omega(p) < p")
            self._memo[p] = w
        return w

    def omega_d(self, d_primes) -> Fraction:
        out = Fraction(1)
        for p in d_primes:
            out *= self.omega(p)
        return out

    @staticmethod
    def unit(kappa: float = 1.0) -> "SiftingDensity":
        return SiftingDensity(lambda p: Fraction(1), kappa)

    @staticmethod
    def zero() -> "SiftingDensity":
        return SiftingDensity(lambda p: Fraction(0), 0.0)


@dataclass(frozen=True)
class ResidueSystem:
    """Forbidden residue classes mod each participating prime."""

    classes: Mapping[int, tuple[int, ...]]

    def __post_init__(self):
        for p, res in self.classes.items():
            if len(set(res)) != len(res) or any(not 0 <= r < p for r in res):
                raise ValueError(f"bad residue set mod {p}: {res}")
            if len(res) >= p:
                raise ValueError(f"|Omega({p})| must stay below {p}")

    def size(self, p: int) -> int:
        return len(self.classes.get(p, ()))

    def primes(self) -> tuple[int, ...]:
        return tuple(sorted(self.classes))

    def supported(self, p: int) -> bool:
        return self.size(p) > 0

    def size_d(self, d_primes) -> int:
        out = 1
        for p in d_primes:
            out *= self.size(p)
        return out

    def roots_mod(self, d_primes) -> list[int]:
        """All residues mod prod(d_primes) lying in Omega(p) for each p (CRT)."""
        m = 1
        roots = [0]
        for p in d_primes:
            res = self.classes.get(p, ())
            new = []
            # CRT step: r mod m, s mod p -> unique class mod m*p
            inv = pow(m % p, -1, p) if m % p else None
            for r in roots:
                for s in res:
                    t = (s - r) * inv % p
                    new.append(r + m * t)
            roots = new
            m *= p
        return roots

    def count_in_interval(self, M: int, N: int, d_primes) -> int:
        """#{n in [M, M+N) : n in Omega(p) for every p | d}."""
        m = 1
        for p in d_primes:
            m *= p
        total = 0
        for r in self.roots_mod(d_primes):
            total += (M + N - 1 - r) // m - (M - 1 - r) // m
        return total


@dataclass(frozen=True)
class OmegaForm:
    """Interval [M, M+N) sifted by forbidden residue classes."""

    M: int
    N: int
    residues: ResidueSystem

    def values(self) -> np.ndarray:
        return np.arange(self.M, self.M + self.N, dtype=np.int64)

    def survivor_mask(self, z: int) -> np.ndarray:
        n = self.values()
        keep = np.ones(self.N, dtype=bool)
        for p in self.residues.primes():
            if p >= z:
                continue
            rem = n % p
            for r in self.residues.classes[p]:
                keep &= rem != r
        return keep

    def sift_count(self, z: int) -> int:
        return int(np.count_nonzero(self.survivor_mask(z)))


class _Profile:
    """Divisibility bit-profile of a problem's elements over a prime window.

    ``hist[mask]`` counts elements whose value is divisible by exactly the
    primes flagged in ``mask``; superset sums then answer every
    |A_d| / |S(A_d, w)| query exactly without touching the elements again.
    """

    def __init__(self, values: np.ndarray, primes: tuple[int, ...]):
        self.primes = primes
        self.index = {p: i for i, p in enumerate(primes)}
        masks = np.zeros(len(values), dtype=np.int64)
        for i, p in enumerate(primes):
            masks |= (values % p == 0).astype(np.int64) << i
        self.hist = np.bincount(masks, minlength=1 << len(primes)).astype(np.int64)
        self._superset = self._superset_sum(self.hist)
        self._sifted: dict[int, np.ndarray] = {}

    @staticmethod
    def _superset_sum(hist: np.ndarray) -> np.ndarray:
        f = hist.copy()
        nbits = int(np.log2(len(f)))
        idx = np.arange(len(f))
        for i in range(nbits):
            lo = idx[(idx >> i) & 1 == 0]
            f[lo] += f[lo | (1 << i)]
        return f

    def bits_of(self, d_primes) -> int:
        bits = 0
        for p in d_primes:
            bits |= 1 << self.index[p]
        return bits

    def window_bits(self, w: int) -> int:
        bits = 0
        for p in self.primes:
            if p < w:
                bits |= 1 << self.index[p]
        return bits

    def count_multiple(self, d_primes) -> int:
        return int(self._superset[self.bits_of(d_primes)])

    def sift_count(self, w: int, d_primes=()) -> int:
        """#{a in A : d | a, a has no prime factor below w (within the window)}."""
        wbits = self.window_bits(w)
        table = self._sifted.get(wbits)
        if table is None:
            masked = self.hist.copy()
            idx = np.arange(len(masked))
            masked[(idx & wbits) != 0] = 0
            table = self._superset_sum(masked)
            self._sifted[wbits] = table
        dbits = self.bits_of(d_primes)
        if dbits & wbits:
            return 0
        return int(table[dbits])


class SieveProblem:
    """A finite sequence with density bookkeeping and exact counting."""

    def __init__(
        self,
        kind: str,
        params: dict,
        X: Fraction,
        density: SiftingDensity,
        *,
        lo: int | None = None,
        hi: int | None = None,
        explicit: np.ndarray | None = None,
        residues: ResidueSystem | None = None,
        omega_interval: tuple[int, int] | None = None,
        table: PrimeTable | None = None,
    ):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.params = dict(params)
        self.X = _as_fraction(X)
        self.density = density
        self._lo = lo
        self._hi = hi
        self._explicit = explicit
        self.residues = residues
        self._omega_interval = omega_interval
        self._table = table
        self._values: np.ndarray | None = explicit
        self._profiles: dict[tuple[int, ...], _Profile] = {}

    # -- element access -------------------------------------------------

    @property
    def size(self) -> int:
        if self._explicit is not None:
            return len(self._explicit)
        return max(self._hi - self._lo, 0)

    def values(self) -> np.ndarray:
        """The element values of A as an int64 array (cached)."""
        if self._values is None:
            if self.size > ORACLE_ELEMENT_CAP:
                raise BudgetError(f"{self.size} elements exceed enumeration cap")
            n = np.arange(self._lo, self._hi, dtype=np.int64)
            if self.kind in ("interval", "progression", "parity"):
                vals = n
            elif self.kind == "twin":
                vals = n * (n + 2)
            elif self.kind == "goldbach":
                vals = n * (self.params["N"] - n)
            else:
                raise AssertionError(self.kind)
            if self.kind == "progression":
                k, l = self.params["k"], self.params["l"]
                vals = vals[vals % k == l % k]
            self._values = vals
        return self._values

    def profile(self, primes: tuple[int, ...] | None = None) -> _Profile:
        if primes is None:
            primes = tuple(p for p in small_primes(_PROFILE_Z))
        prof = self._profiles.get(primes)
        if prof is None:
            prof = _Profile(self.values(), primes)
            self._profiles[primes] = prof
        return prof

    # -- exact counting ---------------------------------------------------

    def count_multiple(self, d: int) -> int:
        """|A_d|: elements whose value is divisible by squarefree d."""
        d_primes = [p for p, _ in factorize(d)] if d > 1 else []
        if self.kind == "interval":
            return (self._hi - 1) // d - (self._lo - 1) // d
        if self.kind in ("twin", "goldbach"):
            roots = self._value_roots(d_primes)
            lo, hi = self._lo, self._hi
            return sum((hi - 1 - r) // d - (lo - 1 - r) // d for r in roots)
        if self.kind == "progression":
            return self._progression_count(d, self.params["k"], self.params["l"])
        vals = self.values()
        return int(np.count_nonzero(vals % d == 0))

    def _progression_count(self, d: int, k: int, l: int) -> int:
        # n = l (mod k), n = 0 (mod d), n in [lo, hi); solvable iff gcd(d, k) | l
        g = math.gcd(d, k)
        if l % g:
            return 0
        m = d * k // g
        kk = k // g
        t = ((l // g) * pow(d // g, -1, kk)) % kk if kk > 1 else 0
        r = (d * t) % m
        assert r % d == 0 and (r - l) % k == 0
        return (self._hi - 1 - r) // m - (self._lo - 1 - r) // m

    def _value_roots(self, d_primes) -> list[int]:
        """Roots mod prod(d_primes) of the defining polynomial of the kind."""
        roots = [0]
        m = 1
        for p in d_primes:
            if self.kind == "twin":
                local = {0, (-2) % p}
            elif self.kind == "goldbach":
                local = {0, self.params["N"] % p}
            else:
                raise AssertionError(self.kind)
            inv = pow(m % p, -1, p)
            roots = [r + m * ((s - r) * inv % p) for r in roots for s in local]
            m *= p
        return roots

    def sift_count(self, z: int, d_primes=()) -> int:
        """Exact #{a in A : d | a, gcd(a, P(z)) = 1}, the oracle count.

        A prime of d lying below z empties the set (every element of the
        class is divisible by it); callers in the iteration identities only
        pass classes whose primes sit at or above the sifting window.
        """
        if z > _PROFILE_Z or any(p >= _PROFILE_Z for p in d_primes):
            vals = self.values()
            keep = np.ones(len(vals), dtype=bool)
            for p in d_primes:
                keep &= vals % p == 0
            for p in primes_up_to_simple(z).primes:
                keep &= vals % int(p) != 0
            return int(np.count_nonzero(keep))
        return self.profile().sift_count(z, d_primes)

    # -- residue-class (Omega) form --------------------------------------

    def omega_form(self) -> OmegaForm:
        """The equivalent interval-plus-residue-classes description."""
        if self._omega_interval is None or self.residues is None:
            raise ValueError(f"kind {self.kind!r} has no residue-class form")
        M, N = self._omega_interval
        return OmegaForm(M, N, self.residues)

    # -- serialization ----------------------------------------------------

    def to_config(self) -> dict:
        return {"kind": self.kind, **self.params}

    def describe(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}({inner})"


def _affine_residues(kind: str, params: dict, z_max: int) -> ResidueSystem:
    classes: dict[int, tuple[int, ...]] = {}
    for p in small_primes(z_max):
        if kind == "interval":
            classes[p] = (0,)
        elif kind == "twin":
            classes[p] = (0,) if p == 2 else (0, p - 2)
        elif kind == "goldbach":
            N = params["N"]
            classes[p] = tuple(sorted({0, N % p}))
        elif kind == "progression":
            k, l = params["k"], params["l"]
            if k % p == 0:
                continue
            classes[p] = ((-l * pow(k, -1, p)) % p,)
    return ResidueSystem(classes)


def build_problem(kind: str, params: Mapping, *, table: PrimeTable | None = None, residue_z: int = _PROFILE_Z) -> SieveProblem:
    """Construct a sieve problem of the given kind.

    ``table`` is required for ``shifted_prime`` and may be supplied for
    ``parity`` to avoid re-sieving.  Affine kinds also carry the equivalent
    interval + residue-system form (change of variables on the index).
    """
    params = dict(params)
    if kind == "interval":
        x, y = int(params["x"]), int(params["y"])
        if not 2 <= y <= x:
            raise ValueError("interval needs 2 <= y <= x")
        lo, hi = x - y + 1, x + 1
        prob = SieveProblem(
            kind, {"x": x, "y": y}, Fraction(y), SiftingDensity.unit(1.0),
            lo=lo, hi=hi,
            residues=_affine_residues(kind, params, residue_z),
            omega_interval=(lo, y),
        )
        return prob
    if kind == "twin":
        x = int(params["x"])
        if x < 5:
            raise ValueError("twin needs x >= 5")
        dens = SiftingDensity(lambda p: Fraction(1 if p == 2 else 2), 2.0)
        return SieveProblem(
            kind, {"x": x}, Fraction(x), dens,
            lo=1, hi=x - 2,
            residues=_affine_residues(kind, params, residue_z),
            omega_interval=(1, x - 3),
        )
    if kind == "goldbach":
        N = int(params["N"])
        if N < 8 or N % 2:
            raise ValueError("goldbach needs even N >= 8")
        dens = SiftingDensity(lambda p: Fraction(1 if N % p == 0 else 2), 2.0)
        return SieveProblem(
            kind, {"N": N}, Fraction(N), dens,
            lo=3, hi=N - 2,
            residues=_affine_residues(kind, params, residue_z),
            omega_interval=(3, N - 5),
        )
    if kind == "shifted_prime":
        x = int(params["x"])
        if table is None or table.limit < x + 2:
            raise ValueError("shifted_prime needs a prime table reaching x + 2")
        ps = table.primes_below(x)
        vals = (ps[ps >= 3] + 2).astype(np.int64)
        dens = SiftingDensity(lambda p: Fraction(0) if p == 2 else Fraction(p, p - 1), 1.0)
        return SieveProblem(kind, {"x": x}, Fraction(li(x)), dens, explicit=vals, table=table)
    if kind == "progression":
        x, k, l = int(params["x"]), int(params["k"]), int(params["l"])
        if k < 1:
            raise ValueError("k must be >= 1")
        if k > 1 and math.gcd(k, l) != 1:
            raise ValueError(f"(k, l) = ({k}, {l}) not coprime")
        l = l % k if k > 1 else 0
        dens = SiftingDensity(lambda p, _k=k: Fraction(0) if _k % p == 0 else Fraction(1), 1.0)
        lo = 1
        first = l if l >= lo else l + k * ((lo - l + k - 1) // k)
        count = max(0, (x - 1 - first) // k + 1) if first < x else 0
        return SieveProblem(
            kind, {"x": x, "k": k, "l": l}, Fraction(x, k), dens,
            lo=lo, hi=x,
            residues=_affine_residues(kind, {"k": k, "l": l}, residue_z),
            omega_interval=((first - l) // k if count else 0, count),
        )
    if kind == "parity":
        x, r = int(params["x"]), int(params["r"])
        if r not in (0, 1):
            raise ValueError("parity r must be 0 or 1")
        if x > ORACLE_ELEMENT_CAP:
            raise BudgetError(f"parity x={x} exceeds enumeration cap")
        big_omega = factor_count_sieve(x)
        vals = np.nonzero((big_omega[1:] & 1) == r)[0].astype(np.int64) + 1
        return SieveProblem(kind, {"x": x, "r": r}, Fraction(x, 2), SiftingDensity.unit(1.0), explicit=vals)
    if kind == "custom":
        vals = np.asarray(params["elements"], dtype=np.int64)
        dens = params.get("density") or SiftingDensity.unit(1.0)
        X = _as_fraction(params.get("X", len(vals)))
        return SieveProblem(kind, {"n_elements": len(vals)}, X, dens, explicit=vals,
                            residues=params.get("residues"))
    raise ValueError(f"unknown kind {kind!r}")


def problem_from_config(config: Mapping, *, table: PrimeTable | None = None) -> SieveProblem:
    cfg = dict(config)
    kind = cfg.pop("kind")
    return build_problem(kind, cfg, table=table)


def factor_count_sieve(x: int) -> np.ndarray:
    """Number of prime divisors counted with multiplicity, for 0 <= n < x."""
    out = np.zeros(x, dtype=np.uint8)
    if x <= 2:
        return out
    for p in primes_up_to_simple(x).primes:
        pk = int(p)
        while pk < x:
            out[pk::pk] += 1
            pk *= int(p)
    return out


def count_in_class(problem: SieveProblem, d: int) -> tuple[int, Fraction]:
    """(|A_d|, remainder): exact count and its deviation from (omega(d)/d) X."""
    factors = factorize(d) if d > 1 else []
    if any(e > 1 for _, e in factors):
        raise ValueError("d must be squarefree")
    d_primes = [p for p, _ in factors]
    count = problem.count_multiple(d)
    main = problem.density.omega_d(d_primes) / d * problem.X
    return count, Fraction(count) - main


def exact_sift(problem: SieveProblem, z: int) -> int:
    """Exact survivor count after sifting by every prime below z."""
    if z < 2:
        raise ValueError("z must be >= 2")
    return problem.sift_count(z)


def divisor_walk(primes, *, max_nu: int | None = None, cap: int = 1 << 25):
    """Yield (d, factors_descending, mu) over squarefree products of ``primes``.

    Primes are consumed in descending order so factor tuples arrive with
    descending factors.  Guards against enumeration blowup via ``cap``.
    """
    ps = sorted(primes, reverse=True)
    if max_nu is None and len(ps) > 25:
        raise BudgetError(f"2^{len(ps)} squarefree divisors exceed the enumeration guard")
    count = 0

    def rec(i, value, factors):
        nonlocal count
        count += 1
        if count > cap:
            raise BudgetError("divisor enumeration exceeded cap")
        yield value, tuple(factors), (-1) ** len(factors)
        if max_nu is not None and len(factors) >= max_nu:
            return
        for j in range(i, len(ps)):
            factors.append(ps[j])
            yield from rec(j + 1, value * ps[j], factors)
            factors.pop()

    yield from rec(0, 1, [])
