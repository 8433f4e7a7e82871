"""Exact elementary number theory: sieving, primality, factoring, orders of 2."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np

from .errors import DomainError, ResourceError

SIEVE_CAP = 2 * 10**8
TRIAL_DIVISION_LIMIT = 10**6
COFACTOR_CAP = 10**18
RHO_SEED = 20240601
RHO_MAX_ITER = 2_000_000

# Strong-pseudoprime bases 2..37 are deterministic below 3.18e23 (Sorenson-Webster).
_MR_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 318665857834031151167461
_MR_RANDOM_ROUNDS = 64

_sieve_table: np.ndarray | None = None
_sieve_limit = 0


def _odd_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # index i <-> odd number 2i+1
    flags = np.ones(limit // 2 + 1, dtype=bool)
    flags[0] = False
    r = math.isqrt(limit)
    for i in range(1, r // 2 + 1):
        if flags[i]:
            p = 2 * i + 1
            flags[p * p // 2 :: p] = False
    odd = 2 * np.flatnonzero(flags[: (limit - 1) // 2 + 1]) + 1
    return np.concatenate(([2], odd)).astype(np.int64)


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (shared, do not mutate)."""
    global _sieve_table
    if limit < 2:
        raise DomainError("limit must be >= 2")
    if limit > SIEVE_CAP:
        raise ResourceError(f"sieve limit {limit} above cap {SIEVE_CAP}")
    if _sieve_limit < limit:
        _build(max(limit, 2 * 10**6))
    return _sieve_table[: np.searchsorted(_sieve_table, limit, side="right")]


def _build(limit: int) -> None:
    global _sieve_table, _sieve_limit
    limit = min(limit, SIEVE_CAP)
    table = _odd_sieve(limit)
    table.setflags(write=False)
    _sieve_table, _sieve_limit = table, limit


def nth_prime(r: int) -> int:
    if r < 1:
        raise DomainError("r must be >= 1")
    # p_r < r(log r + log log r) for r >= 6
    bound = 15 if r < 6 else int(r * (math.log(r) + math.log(math.log(r)))) + 10
    if bound > SIEVE_CAP:
        raise ResourceError(f"nth_prime({r}) needs a sieve beyond {SIEVE_CAP}")
    return int(primes_up_to(bound)[r - 1])


def prime_pi(x: int) -> int:
    return 0 if x < 2 else int(primes_up_to(x).size)


def smallest_prime_factor_table(limit: int) -> np.ndarray:
    """spf[m] for 0 <= m <= limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_up_to(max(2, math.isqrt(limit))):
        p = int(p)
        block = spf[p * p :: p]
        block[block == 0] = p
    idx = np.arange(limit + 1)
    rest = (spf == 0) & (idx >= 2)
    spf[rest] = idx[rest]
    return spf


def divisor_count_table(limit: int) -> np.ndarray:
    """tau(m) for 0 <= m <= limit (tau(0) = 0)."""
    tau = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        tau[d::d] += 1
    return tau


# --------------------------------------------------------------------- primality
def _sprp(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int, rng: random.Random | None = None) -> tuple[bool, bool]:
    """Return ``(is_prime, certain)``.

    Deterministic below ``_MR_DETERMINISTIC_LIMIT``; above it a seeded
    randomized test with 64 rounds, reported as not certain.
    """
    if n < 2:
        return False, True
    for p in _MR_DETERMINISTIC_BASES:
        if n % p == 0:
            return n == p, True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        return all(_sprp(n, a, d, s) for a in _MR_DETERMINISTIC_BASES), True
    rng = rng or random.Random(RHO_SEED)
    for _ in range(_MR_RANDOM_ROUNDS):
        if not _sprp(n, rng.randrange(2, n - 1), d, s):
            return False, True
    return True, False


def is_prime(n: int) -> bool:
    return is_probable_prime(n)[0]


def _brent_rho(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    for _ in range(64):
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        steps = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            steps += r
            if steps > RHO_MAX_ITER:
                raise ResourceError(f"rho iteration budget exhausted on cofactor {n}")
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ResourceError(f"rho failed to split cofactor {n}")


@dataclass(frozen=True)
class NatStats:
    n: int
    factorization: tuple[tuple[int, int], ...]
    phi: int
    mu: int
    tau: int
    certain: bool = field(default=True)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factorization)


def factorize(n: int, seed: int = RHO_SEED, cofactor_cap: int = COFACTOR_CAP) -> tuple[dict[int, int], bool]:
    """Prime factorization of ``n >= 1`` as ``({p: e}, certain)``."""
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    out: dict[int, int] = {}
    certain = True
    m = n
    for p in primes_up_to(TRIAL_DIVISION_LIMIT):
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m == 1:
        return out, certain
    rng = random.Random(seed)
    stack = [m]
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if c <= TRIAL_DIVISION_LIMIT**2:
            # every factor below the trial bound has been removed
            out[c] = out.get(c, 0) + 1
            continue
        prime, sure = is_probable_prime(c, rng)
        if prime:
            certain &= sure
            out[c] = out.get(c, 0) + 1
            continue
        if c > cofactor_cap:
            raise ResourceError(f"composite cofactor {c} exceeds factoring cap {cofactor_cap}")
        g = _brent_rho(c, rng)
        stack.extend((g, c // g))
    return dict(sorted(out.items())), certain


@lru_cache(maxsize=4096)
def multiplicative_stats(n: int) -> NatStats:
    fac, certain = factorize(n)
    phi, tau = 1, 1
    for p, e in fac.items():
        phi *= (p - 1) * p ** (e - 1)
        tau *= e + 1
    if any(e >= 2 for e in fac.values()):
        mu = 0
    else:
        mu = -1 if len(fac) % 2 else 1
    return NatStats(n, tuple(fac.items()), phi, mu, tau, certain)


def euler_phi(n: int) -> int:
    return multiplicative_stats(n).phi


def moebius(n: int) -> int:
    return multiplicative_stats(n).mu


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in multiplicative_stats(n).factorization:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def lcm(*xs: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)


# ------------------------------------------------------------------ orders, symbols
def _order_mod_prime_power(p: int, e: int, base: int = 2) -> int:
    q = p**e
    order = (p - 1) * p ** (e - 1)
    cand = dict(factorize(p - 1)[0])
    if e > 1:
        cand[p] = cand.get(p, 0) + e - 1
    for r in cand:
        while order % r == 0 and pow(base, order // r, q) == 1:
            order //= r
    return order


def mult_order2(q: int) -> int:
    """Multiplicative order of 2 modulo odd ``q >= 3``.

    Computed prime power by prime power and combined with lcm, so the cost is
    dominated by factoring q and the p - 1.
    """
    if q < 3 or q % 2 == 0:
        raise DomainError(f"mult_order2 needs odd q >= 3, got {q}")
    return lcm(*(_order_mod_prime_power(p, e) for p, e in multiplicative_stats(q).factorization))


def jacobi(a: int, n: int) -> int:
    if n < 1 or n % 2 == 0:
        raise DomainError("jacobi needs odd n >= 1")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre_vec(n: int, primes: np.ndarray) -> np.ndarray:
    """Legendre symbols (n/p) for an array of odd primes p < 2**31."""
    primes = np.asarray(primes, dtype=np.int64)
    base = np.mod(n, primes)
    result = np.ones_like(primes)
    exp = (primes - 1) // 2
    b = base.copy()
    while np.any(exp > 0):
        odd = (exp & 1) == 1
        result[odd] = (result[odd] * b[odd]) % primes[odd]
        b = (b * b) % primes
        exp >>= 1
    out = np.where(result == 1, 1, -1)
    out[base == 0] = 0
    return out


def ramanujan(q: int, n: int) -> int:
    """Ramanujan sum c_q(n) = sum over d | gcd(q, n) of d * mu(q/d)."""
    if q < 1:
        raise DomainError("ramanujan needs q >= 1")
    g = math.gcd(q, n)
    return sum(d * moebius(q // d) for d in divisors(g))


def ramanujan_table(q: int) -> dict[int, int]:
    """c_q(m) keyed by g = gcd(m, q), via von Sterneck's formula."""
    phi_q = euler_phi(q)
    return {g: moebius(q // g) * phi_q // euler_phi(q // g) for g in divisors(q)}


def ramanujan_array(q: int, m: np.ndarray) -> np.ndarray:
    """Vectorized c_q over an integer array."""
    table = ramanujan_table(q)
    g = np.gcd(np.asarray(m, dtype=np.int64), q)
    keys = np.array(sorted(table), dtype=np.int64)
    vals = np.array([table[int(k)] for k in keys], dtype=np.int64)
    return vals[np.searchsorted(keys, g)]
