"""Counting with powers of two.

Histograms of r_t(h), distributions of sums of powers of 2 modulo q, the
densities beta(d), the enumeration of small-order moduli, and the constants
c1, c2 and c0 built from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

from . import arith, kernels, series
from .errors import DomainError, ResourceError
from .interval import EXP_GAMMA, RInterval, log

HISTOGRAM_CAP = 2**25
DP_CAP = 10**6  # largest modulus for an exact beta computation
DP_WORK_CAP = 5 * 10**10  # q * rho * t budget for a single distribution
M_MAX = 64
TARGET_C0 = 0.69

_SLOT_BITS = 64


# ------------------------------------------------------------ histograms
@dataclass(frozen=True)
class Histogram:
    t: int
    L: int
    offset: int  # values[i] = r_t(i - offset)
    values: np.ndarray  # uint64

    def __getitem__(self, h: int) -> int:
        i = h + self.offset
        if 0 <= i < self.values.size:
            return int(self.values[i])
        return 0

    @property
    def support(self) -> tuple[int, int]:
        return -self.offset, self.values.size - 1 - self.offset

    def total(self) -> int:
        return sum(int(v) for v in self.values[self.values > 0])


def _pack(coeffs: np.ndarray) -> gmpy2.mpz:
    return gmpy2.from_binary(b"\x01\x01" + coeffs.astype("<u8").tobytes()) if coeffs.size else gmpy2.mpz(0)


def _unpack(z: gmpy2.mpz, n: int) -> np.ndarray:
    raw = gmpy2.to_binary(z)[2:]
    raw = raw + b"\x00" * (8 * n - len(raw))
    return np.frombuffer(raw[: 8 * n], dtype="<u8").copy()


def r_t_histogram(t: int, L: int, cap: int = HISTOGRAM_CAP) -> Histogram:
    """r_t(h) = #{4 <= nu_j, mu_j <= L : sum(2^nu_j - 2^mu_j) = h}, exactly.

    Polynomial arithmetic is done by Kronecker substitution into a single big
    integer with 64-bit slots; every coefficient is at most (L-3)^(2t) < 2^64.
    """
    if t < 1 or L < 4:
        raise DomainError("need t >= 1 and L >= 4")
    if t * 2**L > cap:
        raise ResourceError(f"t * 2^L = {t * 2**L} exceeds the histogram cap {cap}")
    if (L - 3) ** (2 * t) >= 2**_SLOT_BITS:
        raise ResourceError("histogram entries would not fit 64-bit slots")
    deg1 = 2**L - 16
    ind = np.zeros(deg1 + 1, dtype=np.uint64)
    ind[[2**v - 16 for v in range(4, L + 1)]] = 1
    pt = _pack(ind) ** t
    n = t * deg1 + 1
    forward = _pack(_unpack(pt, n))
    backward = _pack(_unpack(pt, n)[::-1])
    corr = _unpack(forward * backward, 2 * n - 1)
    # coefficient k of P(x) * x^(n-1) P(1/x) is r_t(k - (n-1))
    return Histogram(t, L, n - 1, corr)


def r_t_bruteforce(t: int, L: int) -> dict[int, int]:
    from itertools import product

    pw = [2**v for v in range(4, L + 1)]
    out: dict[int, int] = {}
    for us in product(pw, repeat=t):
        su = sum(us)
        for vs in product(pw, repeat=t):
            h = su - sum(vs)
            out[h] = out.get(h, 0) + 1
    return out


# --------------------------------------------- distributions modulo q
@dataclass
class PowerSumDistribution:
    q: int
    rho: int
    t: int
    counts: list[int] | np.ndarray

    def count(self, r: int) -> int:
        return int(self.counts[r % self.q])

    def total(self) -> int:
        return sum(int(c) for c in self.counts)


def _dp_primes(bits_needed: int) -> list[int]:
    out: list[int] = []
    x = 2**62 - 1
    while sum(p.bit_length() - 1 for p in out) < bits_needed:
        if arith.is_prime(x):
            out.append(x)
        x -= 2
    return out


@lru_cache(maxsize=8)
def _fixed_primes(k: int) -> tuple[int, ...]:
    out = []
    x = 2**62 - 1
    while len(out) < k:
        if arith.is_prime(x):
            out.append(x)
        x -= 2
    return tuple(out)


def power_residues(q: int) -> np.ndarray:
    """2^s mod q for s = 1..rho(q)."""
    rho = arith.mult_order2(q)
    return np.array([pow(2, s, q) for s in range(1, rho + 1)], dtype=np.int64)


def power_congruence_count(q: int, t: int, work_cap: int = DP_WORK_CAP) -> tuple[PowerSumDistribution, int]:
    """Distribution of sum_{j<=t} 2^nu_j mod q over nu in [1, rho(q)]^t, and n_q(t).

    n_q(t) = sum_r counts(r)^2 counts pairs of t-tuples with equal residues.
    Counts below 2^64 come straight from the DP; larger ones are rebuilt by
    CRT from DP runs modulo primes just below 2^62.
    """
    if q < 3 or q % 2 == 0:
        raise DomainError(f"q must be odd and >= 3, got {q}")
    if t < 1:
        raise DomainError("t must be >= 1")
    shifts = power_residues(q)
    rho = shifts.size
    if q * rho * t > work_cap:
        raise ResourceError(f"distribution modulo q={q} exceeds the work cap")
    total = rho**t
    if total < 2**64:
        counts = kernels.powersum_counts(q, shifts, t)
        if total < 2**60:
            n = kernels.sum_squares(counts)
        else:
            n = sum(c * c for c in counts.tolist())
        return PowerSumDistribution(q, rho, t, counts), n
    primes = _fixed_primes(-(-(total.bit_length() + 1) // 61))
    residues = [kernels.powersum_counts(q, shifts, t, p).tolist() for p in primes]
    modulus = math.prod(primes)
    coeffs = [(modulus // p) * pow(modulus // p, -1, p) for p in primes]
    counts_big = [sum(c * r[i] for c, r in zip(coeffs, residues)) % modulus for i in range(q)]
    return PowerSumDistribution(q, rho, t, counts_big), sum(c * c for c in counts_big)


def n_q_dft(q: int, t: int) -> int:
    """n_q(t) from (1/q) sum_j |S_q(j)|^(2t), evaluated with mpmath and rounded."""
    import mpmath

    with mpmath.workdps(40):
        shifts = [int(s) for s in power_residues(q)]
        acc = mpmath.mpf(0)
        for j in range(q):
            s = mpmath.fsum(mpmath.expjpi(mpmath.mpf(2 * j * r) / q) for r in shifts)
            acc += abs(s) ** (2 * t)
        val = acc / q
    out = int(mpmath.nint(val))
    if abs(val - out) > 0.4:
        raise ArithmeticError(f"DFT value {val} is not within 0.4 of an integer")
    return out


# ------------------------------------------------------------------ beta
def beta_mod(q: int) -> Fraction:
    """rho(q)^14 / n_q(7)."""
    dist, n = power_congruence_count(q, 7)
    return Fraction(dist.rho**14, n)


def _check_d(d: int) -> None:
    st = arith.multiplicative_stats(d)
    if st.mu == 0 or math.gcd(d, 30) != 1:
        raise DomainError(f"d must be squarefree and coprime to 30, got {d}")


def beta(d: int) -> Fraction:
    _check_d(d)
    return beta_mod(3 * d)


# -------------------------------------------------------- candidate d
@lru_cache(maxsize=4)
def _small_order_primes(M: int) -> tuple[tuple[int, int], ...]:
    """(p, ord_p 2) for primes p > 5 with ord_p 2 < M."""
    found: dict[int, int] = {}
    for e in range(1, M):
        fac, certain = arith.factorize(2**e - 1)
        if not certain:
            raise ResourceError(f"could not certify the factorization of 2^{e}-1")
        for p in fac:
            if p > 5 and p not in found:
                found[p] = e  # first e is the order
    return tuple(sorted(found.items(), key=lambda x: (x[1], x[0])))


def candidate_d_enum(M: int, base: int = 3) -> list[tuple[int, int]]:
    """Squarefree d with all primes > 5 and rho(base*d) < M, sorted by (rho, d).

    ``base`` is 3 for c1 and 15 for c2.
    """
    if not 2 <= M <= M_MAX:
        raise DomainError(f"M must lie in [2, {M_MAX}]")
    if base not in (3, 15):
        raise DomainError("base must be 3 or 15")
    start = arith.mult_order2(base)
    plist = _small_order_primes(M)
    out: list[tuple[int, int]] = []

    def walk(i: int, d: int, order: int) -> None:
        out.append((d, order))
        for j in range(i, len(plist)):
            p, e = plist[j]
            nxt = arith.lcm(order, e)
            if nxt < M:
                walk(j + 1, d * p, nxt)

    if start < M:
        walk(0, 1, start)
    out.sort(key=lambda x: (x[1], x[0]))
    return out


# ------------------------------------------------------------ c1, c2, c0
@dataclass
class CTerm:
    d: int
    rho: int
    inv_beta: Fraction  # exact 1/beta or its fallback upper bound 1/rho
    exact: bool
    term: Fraction  # mu^2/c(d) (1/beta - 1/M)^+, or its upper bound


@dataclass
class ConstantsReport:
    entries: dict[str, RInterval]
    paper_target: float
    verdict: str
    notes: list[str] = field(default_factory=list)
    terms: dict[str, list[CTerm]] = field(default_factory=dict)


def tail_term(M: int, c3: RInterval) -> RInterval:
    """(8 c3 / 15) e^gamma (1 + log M) / M."""
    return Fraction(8, 15) * c3 * EXP_GAMMA * (1 + log(M)) / M


def _c_sum(M: int, base: int, dp_cap: int) -> tuple[Fraction, list[CTerm]]:
    total = Fraction(0)
    terms: list[CTerm] = []
    for d, rho in candidate_d_enum(M, base):
        q = base * d
        inv_c = 1 / series.c_of(d)
        if q <= dp_cap:
            ib = 1 / beta_mod(q)
            exact = True
        else:
            # fixing all but one exponent pins the last one: n <= rho^13
            ib = Fraction(1, rho)
            exact = False
        term = inv_c * max(Fraction(0), ib - Fraction(1, M))
        terms.append(CTerm(d, rho, ib, exact, term))
        total += term
    return total, terms


@lru_cache(maxsize=8)
def c1_c2(M: int = 40, dp_cap: int = DP_CAP) -> ConstantsReport:
    """Upper-bound enclosures of c1, c2 and c0 = 25/32 c1 + 23/32 c2."""
    c3, c4 = series.c3_c4()
    tail = tail_term(M, c3)
    s1, t1 = _c_sum(M, 3, dp_cap)
    s2, t2 = _c_sum(M, 15, dp_cap)
    c1 = RInterval(s1) + tail
    c2 = RInterval(s2) + tail
    c0 = Fraction(25, 32) * c1 + Fraction(23, 32) * c2
    c0_local5 = Fraction(25, 32) * c1 + Fraction(35, 32) * c2
    verdict = "pass" if c0.hi < TARGET_C0 else "fail"
    skipped = [t.d for t in t1 + t2 if not t.exact]
    notes = [
        f"M={M}, exact beta for moduli <= {dp_cap}",
        f"{len(t1)} candidates for c1, {len(t2)} for c2; {len(skipped)} bounded by 1/beta <= 1/rho",
        "c0_local5 replaces 3/2 by the counted 5-adic factor 15/8 (informational)",
    ]
    entries = {
        "c1": c1,
        "c2": c2,
        "c3": c3,
        "c4": c4,
        "c0": c0,
        "c0_local5": c0_local5,
        "tail": tail,
        "c1_sum": RInterval(s1),
        "c2_sum": RInterval(s2),
    }
    return ConstantsReport(entries, TARGET_C0, verdict, notes, {"c1": t1, "c2": t2})


# ------------------------------------------------------------ m(x)
@dataclass(frozen=True)
class MRatioRow:
    x: int
    ratio: Fraction
    bound: RInterval
    holds: bool | None  # None below x = 9 where no claim is made


def m_ratio_check(xmax: int = 40) -> list[MRatioRow]:
    """m(x)/phi(m(x)) against e^gamma log x, with m(x) = prod_{e<=x} (2^e - 1)."""
    if xmax < 3:
        raise DomainError("xmax must be >= 3")
    primes: set[int] = set()
    rows = []
    for e in range(1, xmax + 1):
        fac, certain = arith.factorize(2**e - 1)
        if not certain:
            raise ResourceError(f"could not certify the factorization of 2^{e}-1")
        primes.update(fac)
        if e < 3:
            continue
        ratio = math.prod((Fraction(p, p - 1) for p in primes), start=Fraction(1))
        bound = EXP_GAMMA * log(e)
        holds = None if e < 9 else RInterval(ratio).certainly_le(bound)
        rows.append(MRatioRow(e, ratio, bound, holds))
    return rows
