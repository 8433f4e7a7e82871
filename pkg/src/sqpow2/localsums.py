"""Exact local sums modulo q: Gauss sums, B(n, q), A(n, q), bold-B(p, h), A_d(q, h).

Every quantity of the form ``sum over (a, q) = 1 of (product of Gauss sums) * e(.)``
is evaluated as a count: expanding the Gauss sums turns it into

    sum over (x_1, ..., x_k) of c_q(x_1^2 +- ... +- x_k^2 + shift)

with c_q the Ramanujan sum.  The distribution of the quadratic form over
Z/q is invariant under multiplication by unit squares, so it is carried on
the orbits of that action (3 orbits for an odd prime, O(k) for a prime power)
and convolved orbit by orbit with exact Python integers.  Cost is O(q * orbits)
per convolution step instead of O(q^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import arith
from .errors import DomainError, ResourceError
from .interval import CInterval, RInterval

COUNTING_CAP = 10**6
GAUSS_CAP = 10**6
ORBIT_WORK_CAP = 4 * 10**8  # orbits * q budget for a direct count

# one summand e(r/q) is computed to within 2**-48 (angle rounding plus libm)
_TERM_ERR = 2.0**-48


# ------------------------------------------------------------------ Gauss sums
def _expsum_enclosure(q: int, residues: np.ndarray) -> CInterval:
    ang = (2.0 * math.pi) * (residues.astype(np.float64) / q)
    re = math.fsum(np.cos(ang))
    im = math.fsum(np.sin(ang))
    rad = residues.size * _TERM_ERR + 4 * math.ulp(max(abs(re), abs(im), 1.0))
    return CInterval(RInterval.around(re, rad), RInterval.around(im, rad))


def _check_gauss_cap(q: int) -> None:
    if q < 1:
        raise DomainError("q must be >= 1")
    if q > GAUSS_CAP:
        raise ResourceError(f"Gauss sum modulus {q} above enumeration cap {GAUSS_CAP}")


def gauss_sum(q: int, a: int) -> CInterval:
    """Enclosure of C(q, a) = sum_{x mod q} e(a x^2 / q)."""
    _check_gauss_cap(q)
    x = np.arange(q, dtype=np.int64)
    return _expsum_enclosure(q, (a % q) * (x * x % q) % q)


def gauss_sum_coprime(q: int, a: int) -> CInterval:
    """Enclosure of C*(q, a), the sum restricted to x coprime to q."""
    _check_gauss_cap(q)
    x = np.arange(q, dtype=np.int64)
    x = x[np.gcd(x, q) == 1]
    return _expsum_enclosure(q, (a % q) * (x * x % q) % q)


# ------------------------------------------------------------ orbit counting
class _Orbits:
    """Orbits of Z/q under multiplication by the unit squares."""

    def __init__(self, q: int):
        self.q = q
        r = np.arange(q, dtype=np.int64)
        units = r[np.gcd(r, q) == 1]
        self.unit_squares = np.unique(units * units % q)
        labels = np.full(q, -1, dtype=np.int64)
        reps = []
        while True:
            free = np.flatnonzero(labels < 0)
            if free.size == 0:
                break
            rep = int(free[0])
            labels[np.unique(rep * self.unit_squares % q)] = len(reps)
            reps.append(rep)
        self.labels = labels
        self.reps = np.array(reps, dtype=np.int64)
        self.count = len(reps)
        self.units = units

    def transition(self, weight: np.ndarray) -> np.ndarray:
        """M[o, o'] = sum over s in orbit o' of weight[rep_o - s]."""
        q, idx = self.q, np.arange(self.q, dtype=np.int64)
        rows = [
            np.bincount(self.labels, weights=weight[(rep - idx) % q], minlength=self.count)
            for rep in self.reps
        ]
        mat = np.rint(np.array(rows)).astype(np.int64)
        return mat.astype(object)

    def orbit_sums(self, values: np.ndarray) -> np.ndarray:
        return np.rint(np.bincount(self.labels, weights=values, minlength=self.count)).astype(np.int64).astype(object)


@lru_cache(maxsize=64)
def _orbits(q: int) -> _Orbits:
    return _Orbits(q)


def _square_weights(q: int, scale: int, units_only: bool, sign: int) -> np.ndarray:
    """weight[r] = #{x : sign * scale * x^2 = r mod q}, x over units or all residues."""
    x = np.arange(q, dtype=np.int64)
    if units_only:
        x = x[np.gcd(x, q) == 1]
    vals = (sign * (scale % q) * (x * x % q)) % q
    return np.bincount(vals, minlength=q).astype(np.float64)


def _count_ramanujan(q: int, forms: list[tuple[int, bool, int]], shift: int) -> int:
    """sum over x of c_q(sum_i sign_i * scale_i * x_i^2 + shift), exactly.

    ``forms`` lists (scale, units_only, sign) per variable.
    """
    if q > COUNTING_CAP:
        raise ResourceError(f"counting modulus {q} above cap {COUNTING_CAP}")
    orb = _orbits(q)
    if orb.count * q * len(forms) > ORBIT_WORK_CAP:
        raise ResourceError(f"modulus {q} has {orb.count} orbits; direct count too costly")
    dist = np.zeros(orb.count, dtype=object)
    dist[orb.labels[0]] = 1
    mats: dict[tuple[int, bool, int], np.ndarray] = {}
    for form in forms:
        if form not in mats:
            mats[form] = orb.transition(_square_weights(q, *form))
        dist = mats[form].dot(dist)
    c = arith.ramanujan_array(q, (np.arange(q, dtype=np.int64) + shift) % q)
    return int(orb.orbit_sums(c.astype(np.float64)).dot(dist))


# ------------------------------------------------------------------- B and A
def b_of(n: int, q: int) -> int:
    """B(n, q) = sum_{(a,q)=1} C*(q,a)^4 e(-an/q), as an exact integer."""
    if q < 1:
        raise DomainError("q must be >= 1")
    return _count_ramanujan(q, [(1, True, 1)] * 4, -n)


def b_of_multiplicative(n: int, q: int) -> int:
    """B(n, q) assembled from prime-power factors of q (each counted directly)."""
    out = 1
    for p, e in arith.multiplicative_stats(q).factorization:
        if p > 2 and e >= 2:
            # C*(p^e, a) = 0 for odd p and e >= 2
            return 0
        out *= b_of(n, p**e)
        if out == 0:
            return 0
    return out


def a_of(n: int, q: int) -> Fraction:
    """A(n, q) = B(n, q) / phi(q)^4."""
    return Fraction(b_of(n, q), arith.euler_phi(q) ** 4)


def b_prime_closed(n: int, p: int) -> int:
    """B(n, p) for an odd prime p from the explicit Gauss-sum evaluation.

    With eps = (-1/p): p | n gives (p-1)(p^2 + 6 eps p + 1); otherwise
    -(p^2 + 6 eps p + 1) - 4 eps p (eps p + 1) (-n/p).
    """
    eps = 1 if p % 4 == 1 else -1
    base = p * p + 6 * eps * p + 1
    if n % p == 0:
        return (p - 1) * base
    return -base - 4 * eps * p * (eps * p + 1) * arith.jacobi(-n, p)


def a_of_closed(n: int, p: int) -> Fraction:
    return Fraction(b_prime_closed(n, p), (p - 1) ** 4)


@dataclass(frozen=True)
class LocalFactor:
    p: int
    h_or_n: int
    bvalue: int
    factor: Fraction


def local_factor(n: int, p: int) -> LocalFactor:
    """1 + A(n, p) for an odd prime p, counted exactly."""
    b = b_of(n, p)
    return LocalFactor(p, n, b, 1 + Fraction(b, (p - 1) ** 4))


# ------------------------------------------------------------------ bold B
def _check_odd_prime(p: int) -> None:
    if p == 2:
        raise DomainError("bold-B is only defined for odd primes")
    if p < 3 or not arith.is_prime(p):
        raise DomainError(f"{p} is not an odd prime")


def bbold_closed(p: int, h: int) -> int:
    """Four-case table for bold-B(p, h)."""
    _check_odd_prime(p)
    if p % 4 == 3:
        return (p - 1) * (p + 1) ** 2 if h % p == 0 else -((p + 1) ** 2)
    if h % p == 0:
        return (p - 1) * (p * p + 6 * p + 1)
    return -(p * p + 6 * p + 1) - 4 * p * (p + 1) * arith.jacobi(h, p)


def bbold_exact(p: int, h: int) -> int:
    """sum over units m_1..m_4 of c_p(m1^2 + m2^2 - m3^2 - m4^2 + h)."""
    _check_odd_prime(p)
    return _count_ramanujan(p, [(1, True, 1), (1, True, 1), (1, True, -1), (1, True, -1)], h)


def bbold(p: int, h: int) -> tuple[int, int]:
    """(counted value, closed-form value) of bold-B(p, h)."""
    return bbold_exact(p, h), bbold_closed(p, h)


def bbold_factor(p: int, h: int) -> LocalFactor:
    b = bbold_closed(p, h)
    return LocalFactor(p, h, b, 1 + Fraction(b, (p - 1) ** 4))


# ------------------------------------------------------------ sieve-side sums
def a_d_local(q: int, h: int, d: int) -> int:
    """A_d(q, h) = sum_{(a,q)=1} C*(q,a)^2 C*(q,-a) C(q,-a d^2) e(-ah/q), exactly."""
    if q < 1 or d < 1:
        raise DomainError("q and d must be positive")
    forms = [(1, True, 1), (1, True, 1), (1, True, -1), (d * d, False, -1)]
    return _count_ramanujan(q, forms, -h)


@dataclass(frozen=True)
class OmegaResult:
    p: int
    h: int
    omega: Fraction
    degenerate: bool


def omega_local(p: int, h: int) -> OmegaResult:
    """Omega(p): ratio of the p-local factors of S_p(h) and S_1(h).

    For p not dividing q' the sums A_p(q', h) and A_1(q', h) agree, so only the
    p-part of the two series differs.  When the A_1 factor vanishes the ratio
    is undefined; Omega is then set to 0 and flagged.
    """
    _check_odd_prime(p)
    scale = p * (p - 1) ** 3
    base = 1 + Fraction(a_d_local(p, h, 1), scale)
    if base == 0:
        return OmegaResult(p, h, Fraction(0), True)
    with_p = 1 + Fraction(a_d_local(p, h, p), scale)
    return OmegaResult(p, h, with_p / base, False)


@dataclass(frozen=True)
class LocalIdentity:
    p: int
    h: int
    lhs: Fraction
    rhs: Fraction
    degenerate: bool

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def local_identity(p: int, h: int) -> LocalIdentity:
    """(1 - Omega/p)(1 - 1/p)^-1 (1 + A_1(p,h)/(p(p-1)^3)) against 1 + bold-B(p,h)/(p-1)^4."""
    om = omega_local(p, h)
    middle = 1 + Fraction(a_d_local(p, h, 1), p * (p - 1) ** 3)
    lhs = (1 - om.omega / p) / (1 - Fraction(1, p)) * middle
    rhs = 1 + Fraction(bbold_exact(p, h), (p - 1) ** 4)
    return LocalIdentity(p, h, lhs, rhs, om.degenerate)


# -------------------------------------------------------------- 2-adic factor
DYADIC_COUNT_CAP = 16


@dataclass(frozen=True)
class DyadicTerm:
    k: int
    value: Fraction
    method: str


def dyadic_term(k: int) -> DyadicTerm:
    """sum_{a mod 2^k, odd} C*(2^k,a)^2 C*(2^k,-a) C(2^k,-a) / (2^k phi(2^k)^3)."""
    if k <= DYADIC_COUNT_CAP:
        q = 2**k
        return DyadicTerm(k, Fraction(a_d_local(q, 0, 1), q * (q // 2) ** 3), "counted")
    # For k >= 4 and odd m, (m + 2^(k-2))^2 = m^2 + 2^(k-1) mod 2^k, so the
    # odd-square terms of C*(2^k, a) cancel in pairs and every summand is 0.
    return DyadicTerm(k, Fraction(0), "odd-square pairing")


def dyadic_factor(kmax: int) -> Fraction:
    if kmax < 1:
        raise DomainError("kmax must be >= 1")
    return 1 + sum((dyadic_term(k).value for k in range(1, kmax + 1)), Fraction(0))


def odd_square_shift_invariant(k: int) -> bool:
    """Check directly that odd squares mod 2^k are invariant under +2^(k-1)."""
    q = 2**k
    m = np.arange(1, q, 2, dtype=np.int64)
    sq = np.sort(m * m % q)
    return bool(np.array_equal(sq, np.sort((sq + q // 2) % q)))
