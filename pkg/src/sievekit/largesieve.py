"""Numerical verification engines for the large-sieve inequality family.

Covers the abstract Hilbert-space inequality, the additive forms over
well-separated points (Farey fractions in particular), the prime-frequency
energy identity behind the earliest duality argument, and the
multiplicative form over primitive Dirichlet characters via Gauss sums.

Inequalities are checked strictly after a 1e-12 relative slack guard, so
rounding can never produce a spurious violation; identities use a 1e-9
relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import BudgetError, euler_phi, factorize

IDENT_RTOL = 1e-9
INEQ_SLACK = 1e-12


def min_circular_distance(points) -> Fraction | float:
    """Minimum pairwise distance mod 1; exact when points are Fractions."""
    pts = sorted(points)
    if len(pts) < 2:
        raise ValueError("need at least two points for a separation")
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gaps.append(1 - pts[-1] + pts[0])
    return min(gaps)


@dataclass(frozen=True)
class SeparatedPoints:
    """Points in [0, 1) with a certified minimum circular separation."""

    points: tuple
    delta: Fraction | float

    def __post_init__(self):
        if len(self.points) > 1 and min_circular_distance(self.points) < self.delta:
            raise ValueError("points are closer than the declared separation")
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    def as_floats(self) -> np.ndarray:
        return np.array([float(t) for t in self.points])


def farey_points(Q: int) -> SeparatedPoints:
    """All reduced fractions a/q with q <= Q in [0, 1); delta = 1/(Q(Q-1))."""
    if Q < 2:
        raise ValueError("Q must be >= 2")
    pts = [Fraction(0)]
    for q in range(2, Q + 1):
        for a in range(1, q):
            if math.gcd(a, q) == 1:
                pts.append(Fraction(a, q))
    return SeparatedPoints(tuple(sorted(pts)), Fraction(1, Q * (Q - 1)))


def _phase_matrix(theta: np.ndarray, M: int, N: int) -> np.ndarray:
    n = np.arange(M, M + N)
    return np.exp(2j * np.pi * np.outer(theta, n))


def additive_ls_check(points: SeparatedPoints, coefficients, M: int = 0) -> tuple[float, float, float]:
    """Point-side energy against (N - 1 + 1/delta) x coefficient energy.

    lhs = sum over points of |sum_n a_n e(n theta)|^2, coefficients indexed
    over [M, M+N).  Returns (lhs, rhs, ratio); the inequality asserts
    ratio <= 1.
    """
    a = np.asarray(coefficients, dtype=complex)
    N = len(a)
    if N == 0:
        raise ValueError("empty coefficient vector")
    E = _phase_matrix(points.as_floats(), M, N)
    lhs = float(np.sum(np.abs(E @ a) ** 2))
    rhs = float((N - 1 + 1 / points.delta) * np.sum(np.abs(a) ** 2))
    ratio = 0.0 if rhs == 0 else lhs / rhs
    return lhs, rhs, ratio


def dual_ls_check(points: SeparatedPoints, point_coefficients, M: int, N: int) -> tuple[float, float, float]:
    """Interval-side energy of a point-supported polynomial, same constant."""
    b = np.asarray(point_coefficients, dtype=complex)
    if len(b) != len(points.points):
        raise ValueError("one coefficient per point required")
    E = _phase_matrix(points.as_floats(), M, N)
    lhs = float(np.sum(np.abs(E.T @ b) ** 2))
    rhs = float((N - 1 + 1 / points.delta) * np.sum(np.abs(b) ** 2))
    ratio = 0.0 if rhs == 0 else lhs / rhs
    return lhs, rhs, ratio


def hilbert_ls_check(vectors, psi) -> tuple[float, float]:
    """Selberg's inner-product inequality on explicit finite-dimensional data.

    lhs = sum over m of |<psi, v_m>|^2 / sum_n |<v_m, v_n>|, rhs = <psi, psi>.
    """
    V = np.asarray(vectors, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if V.ndim != 2 or V.shape[1] != len(psi):
        raise ValueError("vectors must be rows matching psi's dimension")
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector in family")
    gram = np.abs(V @ V.conj().T)
    inner = np.abs(V @ psi.conj()) ** 2
    lhs = float(np.sum(inner / gram.sum(axis=1)))
    rhs = float(np.real(np.vdot(psi, psi)))
    return lhs, rhs


def linnik_identity_check(indicator, p: int, theta: float, M: int = 0, *, omega_size: int | None = None) -> dict:
    """Energy identity splitting a frequency window over residue classes mod p.

    lhs = sum over a = 1..p-1 of |U(theta + a/p)|^2 must equal
    rhs = p * sum over a mod p of |U(theta; p, a)|^2 - |U(theta)|^2 exactly.
    When ``omega_size`` is given, the derived lower-bound inequality
    |U(theta)|^2 * omega/(p - omega) <= lhs is reported as well.
    """
    w = np.asarray(indicator, dtype=float)
    n = np.arange(M, M + len(w))
    def U(t):
        return complex(np.sum(w * np.exp(2j * np.pi * n * t)))
    lhs = sum(abs(U(theta + a / p)) ** 2 for a in range(1, p))
    per_class = 0.0
    for a in range(p):
        mask = n % p == a
        per_class += abs(complex(np.sum(w[mask] * np.exp(2j * np.pi * n[mask] * theta)))) ** 2
    u0 = abs(U(theta)) ** 2
    rhs = p * per_class - u0
    scale = max(lhs, rhs, 1.0)
    report = {
        "lhs": lhs,
        "rhs": rhs,
        "identity_holds": abs(lhs - rhs) <= IDENT_RTOL * scale,
    }
    if omega_size is not None:
        bound = u0 * omega_size / (p - omega_size)
        report["inequality_lhs"] = bound
        report["inequality_holds"] = bound <= lhs + INEQ_SLACK * scale
    return report


# ---------------------------------------------------------------------------
# Dirichlet characters

CHARACTER_MODULUS_CAP = 1000


def _unit_group(q: int) -> tuple[list[int], list[int]]:
    """Generators and their orders for the unit group mod q (CRT components)."""
    if q == 1:
        return [], []
    gens: list[int] = []
    orders: list[int] = []
    for p, e in factorize(q):
        pe = p**e
        rest = q // pe
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                local = [(3, 2)]
            else:
                local = [(pe - 1, 2), (5, 2 ** (e - 2))]
        else:
            g = _primitive_root(p, e)
            local = [(g, euler_phi(pe))]
        for g, order in local:
            # lift the local generator to 1 mod rest via CRT
            lifted = _crt_lift(g, pe, 1, rest) if rest > 1 else g % q
            gens.append(lifted)
            orders.append(order)
    return gens, orders


def _crt_lift(a: int, m: int, b: int, n: int) -> int:
    t = (b - a) * pow(m, -1, n) % n
    return (a + m * t) % (m * n)


def _primitive_root(p: int, e: int) -> int:
    phi = p - 1
    factors = [f for f, _ in factorize(phi)]
    g = next(
        g for g in range(2, p)
        if all(pow(g, phi // f, p) != 1 for f in factors)
    )
    if e == 1:
        return g
    # lift to prime powers: g or g + p generates mod p^2 and then all p^e
    if pow(g, phi, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class CharacterTable:
    """All Dirichlet characters mod q with conductors and Gauss sums.

    ``exponents[j, n]`` holds integer t with chi_j(n) = e(t / group_exponent)
    and -1 marking non-units, so orthogonality and conductor logic stay
    exact; ``values`` is the complex rendering.
    """

    q: int
    exponents: np.ndarray
    values: np.ndarray
    group_exponent: int
    conductors: np.ndarray
    gauss_sums: np.ndarray

    @property
    def n_characters(self) -> int:
        return self.values.shape[0]

    @property
    def primitive(self) -> np.ndarray:
        return self.conductors == self.q

    def chi(self, j: int, n: int) -> complex:
        return self.values[j, n % self.q]


@lru_cache(maxsize=2048)
def character_table(q: int, *, cap: int = CHARACTER_MODULUS_CAP) -> CharacterTable:
    """Build the full character group mod q by brute-force discrete logs."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if q > cap:
        raise BudgetError(f"modulus {q} above character budget {cap}")
    if q == 1:
        exps = np.zeros((1, 1), dtype=np.int64)
        vals = np.ones((1, 1), dtype=complex)
        return CharacterTable(1, exps, vals, 1, np.array([1]), np.array([1.0 + 0j]))
    gens, orders = _unit_group(q)
    e = math.lcm(*orders) if orders else 1
    # discrete logs of every unit by enumerating the generator lattice
    logs = {}
    units = []

    def walk(i, value, vec):
        if i == len(gens):
            logs[value] = tuple(vec)
            units.append(value)
            return
        acc = value
        for k in range(orders[i]):
            walk(i + 1, acc, vec + [k])
            acc = acc * gens[i] % q

    walk(0, 1, [])
    assert len(units) == euler_phi(q)
    n_chars = len(units)
    exps = np.full((n_chars, q), -1, dtype=np.int64)
    char_vecs = list(logs.values())  # character index lattice = unit lattice
    for j, jvec in enumerate(char_vecs):
        for n, nvec in logs.items():
            t = 0
            for jv, nv, order in zip(jvec, nvec, orders):
                t += jv * nv * (e // order)
            exps[j, n] = t % e
    roots = np.exp(2j * np.pi * np.arange(e) / e)
    vals = np.where(exps >= 0, roots[np.maximum(exps, 0)], 0.0)
    conductors = np.array([_conductor(q, exps[j], e) for j in range(n_chars)])
    phases = np.exp(2j * np.pi * np.arange(q) / q)
    gauss = vals @ phases
    return CharacterTable(q, exps, vals, e, conductors, gauss)


def _conductor(q: int, exp_row: np.ndarray, e: int) -> int:
    divisors = sorted(d for d in range(1, q + 1) if q % d == 0)
    for f in divisors:
        ok = True
        for n in range(1, q):
            if exp_row[n] >= 0 and (n - 1) % f == 0 and exp_row[n] != 0:
                ok = False
                break
        if ok:
            return f
    return q


def multiplicative_ls_check(Q: int, coefficients, M: int = 0) -> tuple[float, float]:
    """Primitive-character energy against (N - 1 + Q^2) x coefficient energy.

    lhs = sum over q < Q of (q/phi(q)) sum over primitive chi mod q of
    |sum_n a_n chi(n)|^2.  The modulus q = 1 contributes the trivial
    character with weight 1 (its conductor is 1, hence primitive here).
    """
    a = np.asarray(coefficients, dtype=complex)
    N = len(a)
    n = np.arange(M, M + N)
    lhs = 0.0
    for q in range(1, Q):
        table = character_table(q)
        prim = np.nonzero(table.primitive)[0]
        if len(prim) == 0:
            continue
        chi_vals = table.values[np.ix_(prim, n % q)]
        sums = chi_vals @ a
        lhs += q / euler_phi(q) * float(np.sum(np.abs(sums) ** 2))
    rhs = float((N - 1 + Q * Q) * np.sum(np.abs(a) ** 2))
    return lhs, rhs


def character_sum_via_gauss(table: CharacterTable, j: int, coefficients, M: int = 0) -> complex:
    """Evaluate sum a_n chi(n) through the additive-character expansion.

    Valid for primitive chi: chi(n) = (1/tau(conj chi)) sum_a conj(chi)(a) e(an/q).
    """
    if table.conductors[j] != table.q:
        raise ValueError("gauss expansion requires a primitive character")
    q = table.q
    a = np.asarray(coefficients, dtype=complex)
    n = np.arange(M, M + len(a))
    chi_bar = np.conj(table.values[j])
    tau_bar = np.sum(chi_bar * np.exp(2j * np.pi * np.arange(q) / q))
    total = 0j
    for r in range(q):
        if chi_bar[r] == 0:
            continue
        total += chi_bar[r] * np.sum(a * np.exp(2j * np.pi * r * n / q))
    return complex(total / tau_bar)


def power_iteration_norm(matrix: np.ndarray, *, tol: float = 1e-12, max_iter: int = 20000, seed: int = 0) -> float:
    """Largest eigenvalue of M M^H by power iteration (deterministic start)."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=matrix.shape[1]) + 1j * rng.normal(size=matrix.shape[1])
    v /= np.linalg.norm(v)
    last = 0.0
    for _ in range(max_iter):
        w = matrix.conj().T @ (matrix @ v)
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        v = w / norm
        ray = float(np.real(np.vdot(v, matrix.conj().T @ (matrix @ v))))
        if abs(ray - last) <= tol * max(ray, 1.0):
            return ray
        last = ray
    return last


def duality_rayleigh(points: SeparatedPoints, M: int, N: int, *, tol: float = 1e-12) -> tuple[float, float]:
    """Top Rayleigh quotients of the point-side and interval-side forms.

    The two positive forms share their nonzero spectrum, so the returned
    pair must agree (up to iteration tolerance); this is the numerical
    content of the adjoint-norm equality.
    """
    E = _phase_matrix(points.as_floats(), M, N)
    return power_iteration_norm(E, tol=tol), power_iteration_norm(E.conj().T, tol=tol)
