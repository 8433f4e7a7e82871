"""Numerics for the lower bound on averaged singular series, and the final margin."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from . import arith, kernels, localsums, powers2, series
from .errors import DomainError, ResourceError
from .interval import RInterval

P_INDEX = 5000
Q_SMALL = 5005  # product of primes 3 < p < 14
Q3 = 3 * Q_SMALL
MAXEXP_CAP = 10**10
LAMBDA = Fraction("0.887167")
MAJOR_FLOOR = Fraction(9, 10)
MARGIN_FACTOR = 45

# per-term error of a float exponential sum: angle reduction, libm cos/sin, and
# accumulation over at most rho terms are each far below this
_EXPSUM_TERM_ERR = 2.0**-40


@dataclass(frozen=True)
class PrimeProduct:
    head: RInterval
    tail: RInterval
    C1: RInterval
    p_bound: int


def _tree_prod(xs: list[int]) -> int:
    while len(xs) > 1:
        xs = [xs[i] * xs[i + 1] if i + 1 < len(xs) else xs[i] for i in range(0, len(xs), 2)]
    return xs[0] if xs else 1


def _lower_numerator(p: int) -> int:
    return 5 * p * p + 10 * p + 1 if p % 4 == 1 else 5 * p * p - 2 * p + 1


def prime_product_51(reverse: bool = False) -> PrimeProduct:
    """Head product over 17 <= p < p_5000 of the pointwise lower bounds for 1 + A(n,p),
    the telescoped tail (1 - 1/(p_5000 - 1))^6, and their product C1.

    The head is an exact rational (numerator and denominator multiplied
    separately), rounded outward once.
    """
    pz = arith.nth_prime(P_INDEX)
    ps = [int(p) for p in arith.primes_up_to(pz - 1) if p >= 17]
    if reverse:
        ps.reverse()
    den = [(p - 1) ** 4 for p in ps]
    num = [d - _lower_numerator(p) for p, d in zip(ps, den)]
    head = RInterval(Fraction(_tree_prod(num), _tree_prod(den)))
    tail = RInterval(Fraction(pz - 2, pz - 1) ** 6)
    return PrimeProduct(head, tail, head * tail, pz)


# ---------------------------------------------------------------- maxexp
@dataclass
class MaxExpResult:
    q: int
    rho: int
    max_abs: RInterval
    attaining_j: int
    slack: dict[int, RInterval] = field(default_factory=dict)
    abs_values: np.ndarray | None = None

    def downstream_ok(self, C1: RInterval, k: int = 44) -> bool:
        """8 C1 (1 - slack_k) >= 7.2, the inequality the averaged bound needs."""
        return (8 * C1 * (1 - self.slack[k])).lo >= 7.2


def maxexp(q: int = Q3, k_list: tuple[int, ...] = (35, 44), keep_values: bool = False) -> MaxExpResult:
    """max over 1 <= j < q of |sum_{s=1}^{rho} e(j 2^s / q)|, with a rigorous radius."""
    rho = arith.mult_order2(q)
    if q * rho > MAXEXP_CAP:
        raise ResourceError(f"q * rho = {q * rho} exceeds the scan cap")
    re, im = kernels.expsum_table(q, powers2.power_residues(q))
    mag = np.hypot(re[1:], im[1:])
    j = int(np.argmax(mag)) + 1
    rad = rho * _EXPSUM_TERM_ERR
    m = float(mag[j - 1])
    max_abs = RInterval(max(m - rad, 0.0), m + rad)
    slack = {k: (q - 1) * (max_abs / rho) ** k for k in k_list}
    return MaxExpResult(q, rho, max_abs, j, slack, mag if keep_values else None)


# ----------------------------------------------------------- residue counts
@lru_cache(maxsize=4)
def _distribution(q3: int, k: int) -> powers2.PowerSumDistribution:
    return powers2.power_congruence_count(q3, k)[0]


@dataclass(frozen=True)
class ResidueCount:
    q3: int
    k: int
    a: int
    count: int
    expected: Fraction  # rho^k / q3
    relative_deviation: Fraction
    slack: RInterval
    lower_bound_ok: bool
    in_band: bool


def residue_count(q3: int, k: int, a: int, mx: MaxExpResult | None = None) -> ResidueCount:
    """#{nu in [1, rho]^k : sum 2^nu_j = a (mod q3)} and its check against the DFT band
    rho^k/q3 (1 +- (q3-1)(max/rho)^k)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    dist = _distribution(q3, k)
    count = dist.count(a)
    expected = Fraction(dist.rho**k, q3)
    dev = Fraction(count) / expected - 1
    if mx is None or k not in mx.slack:
        mx = maxexp(q3, (k,))
    slack = mx.slack[k]
    lower_ok = dev >= -Fraction(slack.lo)
    band = abs(dev) <= Fraction(slack.lo)
    return ResidueCount(q3, k, a, count, expected, dev, slack, lower_ok, band)


def residue_count_bruteforce(q3: int, k: int, a: int) -> int:
    res = [int(r) for r in powers2.power_residues(q3)]
    return sum(1 for tup in product(res, repeat=k) if (sum(tup) - a) % q3 == 0)


def crt_residue(j: int, q: int = Q_SMALL) -> int:
    """a with a = 0 (mod 3) and a = j (mod q), for q coprime to 3."""
    return (3 * (j * pow(3, -1, q) % q)) % (3 * q)


# ------------------------------------------------------ local sum identity
@dataclass(frozen=True)
class SumAResult:
    p: int
    total: Fraction
    holds: bool


def sum_A_identity(p: int) -> SumAResult:
    """sum_{j=1}^{p} (1 + A(j, p)) == p, with A counted exactly."""
    if not arith.is_prime(p):
        raise DomainError(f"{p} is not prime")
    total = sum((1 + localsums.a_of(j, p) for j in range(1, p + 1)), Fraction(0))
    return SumAResult(p, total, total == p)


# ---------------------------------------------------- averaged singular series
def exponent_bound(N: int) -> float:
    return math.log(N / math.log(N)) / math.log(2)


@dataclass
class AverageReport:
    N: int
    k: int
    L: float
    tuples: int
    kept: int
    total: RInterval
    ratio: RInterval
    target: float = 0.9


@lru_cache(maxsize=1 << 16)
def _sseries(n: int, pmax: int) -> RInterval:
    return series.singular_series(n, pmax, strict=False).value


def avg_singular_series(N: int, k: int, pmax: int = 10**4, max_tuples: int = 10**6) -> AverageReport:
    """sum of singular series over n = N - sum 2^nu_j (ordered tuples, 4 <= nu_j <= L)
    with n >= 2 and n = 4 (mod 24), normalized by 8 (L-3)^k."""
    if N % 8 != 4:
        raise DomainError("N must be 4 mod 8")
    if not 1 <= k <= 4 or N > 10**7:
        raise ResourceError("desk scale is k <= 4 and N <= 10^7")
    L = exponent_bound(N)
    top = int(math.floor(L))
    exps = range(4, top + 1)
    if len(exps) ** k > max_tuples:
        raise ResourceError("too many tuples")
    total = RInterval(0)
    kept = 0
    los, his = [], []
    for tup in product(exps, repeat=k):
        n = N - sum(2**v for v in tup)
        assert n % 8 == 4
        if n < 2 or n % 24 != 4:
            continue
        kept += 1
        v = _sseries(n, pmax)
        los.append(v.lo)
        his.append(v.hi)
    if los:
        total = RInterval(math.nextafter(math.fsum(los), -math.inf), math.nextafter(math.fsum(his), math.inf))
    ratio = total / (8 * RInterval(L - 3) ** k)
    return AverageReport(N, k, L, len(exps) ** k, kept, total, ratio)


# -------------------------------------------------------------- margin
@dataclass(frozen=True)
class MarginInput:
    k: int
    c0: RInterval
    ji_ratio: RInterval
    lam: Fraction = LAMBDA
    major_floor: Fraction = MAJOR_FLOOR

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise DomainError("lambda must lie in (0, 1)")
        if self.ji_ratio.hi < 1:
            raise DomainError("ji_ratio must be >= 1")


def margin_at(inp: MarginInput, k: int) -> RInterval:
    """0.9 - lambda^(k-14) * 45 * c0 * ji_ratio, in units of the singular integral at 1."""
    lam = RInterval(inp.lam)
    return RInterval(inp.major_floor) - lam ** (k - 14) * MARGIN_FACTOR * inp.c0 * inp.ji_ratio


def final_margin(inp: MarginInput, kmax: int = 400) -> tuple[RInterval, int]:
    """(margin at inp.k, least k > 14 whose margin has a positive lower endpoint)."""
    k = 15
    while margin_at(inp, k).lo <= 0:
        k += 1
        if k > kmax:
            raise ResourceError("no k up to kmax gives a positive margin")
    return margin_at(inp, inp.k), k
