"""Singular series, the weights a(p), b(p), c(d), kappa(h) and the constants c3, c4."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import arith, localsums
from .errors import DomainError
from .interval import RInterval, exp, one_plus_ratio_bounds, prod_positive

DEFAULT_PMAX = 10**5
C3C4_PMAX = 2 * 10**6
LOCAL_BOUND_CHECK_PMAX = 10**4

# reference targets
C3_TARGET = 1.3904
C4_TARGET = 0.9743


# ------------------------------------------------------------------ weights
def a_weight(p: int) -> int:
    return -((p + 1) ** 2) if p % 4 == 3 else 3 * p * p - 2 * p - 1


def b_weight(p: int) -> int:
    return (p - 1) * (p + 1) ** 2 if p % 4 == 3 else (p - 1) * (p * p + 6 * p + 1)


def one_plus_inv_c(p: int) -> Fraction:
    """1 + 1/c(p) = (1 + b(p)/(p-1)^4) / (1 + a(p)/(p-1)^4)."""
    if p <= 5:
        raise DomainError("c(p) is defined for primes p > 5 only")
    d = (p - 1) ** 4
    return Fraction(d + b_weight(p), d + a_weight(p))


@dataclass(frozen=True)
class WeightTriple:
    p: int
    a_val: int
    b_val: int
    c_val: Fraction


def abc_weights(p: int) -> WeightTriple:
    if p <= 5 or not arith.is_prime(p):
        raise DomainError(f"abc_weights needs a prime p > 5, got {p}")
    return WeightTriple(p, a_weight(p), b_weight(p), 1 / (one_plus_inv_c(p) - 1))


def c_of(d: int) -> Fraction:
    """Multiplicative c(d) for squarefree d coprime to 30 (c(1) = 1)."""
    st = arith.multiplicative_stats(d)
    if st.mu == 0 or math.gcd(d, 30) != 1:
        raise DomainError(f"c(d) needs squarefree d coprime to 30, got {d}")
    out = Fraction(1)
    for p in st.primes:
        out *= abc_weights(p).c_val
    return out


def kappa(h: int) -> Fraction:
    """(25 + 15 (h/5)) / 32 if 5 does not divide h, and 3/2 if it does."""
    if h == 0:
        raise DomainError("kappa(0) is undefined")
    if h % 5 == 0:
        return Fraction(3, 2)
    return Fraction(25 + 15 * arith.jacobi(h, 5), 32)


def five_adic_factor(h: int) -> Fraction:
    """The actual p = 5 factor 1 + bold-B(5, h)/4^4 of bold-S(h)."""
    return localsums.bbold_factor(5, h).factor


# ---------------------------------------------------------------- tails
def _inverse_square_tail(P: int) -> Fraction:
    """Upper bound for sum of 1/(p-1)^2 over primes p > P >= 5.

    p - 1 = m >= P runs over m = 0, 4 (mod 6); each class contributes at most
    1/m0^2 + 1/(6 m0).
    """
    return Fraction(2, P * P) + Fraction(1, 3 * P)


def _log_tail(K: Fraction, P: int, xmax: Fraction) -> RInterval:
    """Enclosure of sum_{p>P} log(1 + x_p) given |x_p| <= K/(p-1)^2 <= xmax < 1."""
    bound = K * _inverse_square_tail(P) / (1 - xmax)
    return RInterval(-bound, bound)


@dataclass
class SeriesValue:
    value: RInterval
    pmax: int
    tail_log_bound: RInterval
    exact_part: str
    extras: dict = field(default_factory=dict)


def _odd_primes_from5(pmax: int) -> np.ndarray:
    ps = arith.primes_up_to(pmax)
    return ps[ps >= 5]


def _local_pk_bound(P: int) -> tuple[Fraction, Fraction]:
    """K and xmax with (5p^2 + 10p + 1)/(p-1)^4 <= K/(p-1)^2 <= xmax for p > P."""
    K = Fraction(5 * (P + 1) ** 2 + 10 * (P + 1) + 1, P * P)
    return K, K / (P * P)


def check_local_bound(pmax: int = LOCAL_BOUND_CHECK_PMAX) -> bool:
    """|B(n,p)| <= 5p^2 + 10p + 1 for p not dividing n, every odd p <= pmax.

    B(n, p) for p not dividing n depends only on (-n/p), so two residues cover all n.
    """
    for p in arith.primes_up_to(pmax)[1:]:
        p = int(p)
        lim = 5 * p * p + 10 * p + 1
        for n in (1, _nonresidue(p)):
            n = -n  # (-n/p) = (n'/p) for n' = -n
            if abs(localsums.b_prime_closed(n, p)) > lim:
                return False
    return True


def _nonresidue(p: int) -> int:
    for a in range(2, p):
        if arith.jacobi(a, p) == -1:
            return a
    return 1


def _small_prime_part(n: int) -> Fraction:
    """(1 + A(n,2) + A(n,4) + A(n,8)) (1 + A(n,3)), counted exactly."""
    two = 1 + sum((localsums.a_of(n, 2**j) for j in (1, 2, 3)), Fraction(0))
    return two * (1 + localsums.a_of(n, 3))


def _euler_factors(n: int, ps: np.ndarray, signs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Enclosures of 1 + B/(p-1)^4 for primes p not dividing n, B from the closed form."""
    pf = ps.astype(np.float64)
    eps = np.where(ps % 4 == 1, 1.0, -1.0)
    base = pf * pf + 6 * eps * pf + 1
    bval = -base - 4 * eps * pf * (eps * pf + 1) * signs
    return one_plus_ratio_bounds(bval, (pf - 1) ** 4)


def _bbold_factors(ps: np.ndarray, signs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Enclosures of 1 + bold-B(p,h)/(p-1)^4 for primes p not dividing h."""
    pf = ps.astype(np.float64)
    bval = np.where(
        ps % 4 == 3,
        -((pf + 1) ** 2),
        -(pf * pf + 6 * pf + 1) - 4 * pf * (pf + 1) * signs,
    )
    return one_plus_ratio_bounds(bval, (pf - 1) ** 4)


def singular_series(n: int, pmax: int = DEFAULT_PMAX, strict: bool = True) -> SeriesValue:
    """Enclosure of the singular series for four prime squares at n.

    The 2- and 3-parts are counted exactly (they give 24 when n = 4 mod 24);
    odd primes 5 <= p <= pmax use closed-form local factors, primes dividing n
    are exact rationals, and p > pmax is covered by the (5p^2+10p+1)/(p-1)^4 tail.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    st = arith.multiplicative_stats(n)
    if strict and st.primes and st.primes[-1] > pmax:
        raise DomainError(f"pmax={pmax} is below the largest prime factor {st.primes[-1]} of n")
    if pmax < 13:
        raise DomainError("pmax must be >= 13")
    small = _small_prime_part(n)
    ps = _odd_primes_from5(pmax)
    divides = (n % ps) == 0
    free = ps[~divides]
    lo, hi = _euler_factors(n, free, arith.legendre_vec(-n, free))
    exact = Fraction(1)
    # with strict=False, prime factors above pmax are exact too; the tail bound
    # below covers every other prime beyond pmax
    for p in [int(p) for p in ps[divides]] + [p for p in st.primes if p > pmax]:
        exact *= 1 + localsums.a_of_closed(n, p)
    if small == 0 or exact == 0:
        zero = RInterval(0)
        return SeriesValue(zero, pmax, RInterval(0), "vanishing local factor")
    head = prod_positive(lo, hi) * RInterval(small * exact)
    K, xmax = _local_pk_bound(pmax)
    tail = _log_tail(K, pmax, xmax)
    return SeriesValue(
        head * exp(tail),
        pmax,
        tail,
        f"2,3 counted; {int(divides.sum())} primes dividing n exact; closed forms for 5<=p<={pmax}",
        {"small_prime_part": small},
    )


def sbold(h: int, pmax: int = DEFAULT_PMAX) -> SeriesValue:
    """Enclosure of bold-S(h) = prod_{p>2} (1 + bold-B(p,h)/(p-1)^4).

    ``extras`` carries the pointwise bound 3 c4 kappa~(h) prod_{p|h, p>5}(1 + 1/c(p))
    and the same bound with the true 5-adic factor in place of kappa.
    """
    if h == 0:
        raise DomainError("h must be nonzero")
    st = arith.multiplicative_stats(abs(h))
    if st.primes and st.primes[-1] > pmax:
        raise DomainError(f"pmax={pmax} is below the largest prime factor {st.primes[-1]} of h")
    f3 = localsums.bbold_factor(3, h).factor
    extras: dict = {"p3_factor": f3}
    if f3 == 0:
        extras["bound_kappa"] = RInterval(0)
        extras["bound_local5"] = RInterval(0)
        return SeriesValue(RInterval(0), pmax, RInterval(0), "p=3 factor vanishes (3 does not divide h)", extras)
    ps = _odd_primes_from5(pmax)
    divides = (h % ps) == 0
    free = ps[~divides]
    lo, hi = _bbold_factors(free, arith.legendre_vec(h, free))
    exact = Fraction(f3)
    for p in ps[divides]:
        exact *= localsums.bbold_factor(int(p), h).factor
    K, xmax = _local_pk_bound(pmax)
    tail = _log_tail(K, pmax, xmax)
    value = prod_positive(lo, hi) * RInterval(exact) * exp(tail)
    c4 = c3_c4()[1]
    prod_c = Fraction(1)
    for p in st.primes:
        if p > 5:
            prod_c *= one_plus_inv_c(p)
    extras["bound_kappa"] = 3 * c4 * RInterval(kappa(h) * prod_c)
    extras["bound_local5"] = 3 * c4 * RInterval(five_adic_factor(h) * prod_c)
    return SeriesValue(value, pmax, tail, "p=3 exact; closed forms for 5<=p<=pmax", extras)


# ------------------------------------------------------------- c3 and c4
def _c3_dev_numerator(pf: np.ndarray, ps: np.ndarray) -> np.ndarray:
    # (D+b)(p-1) - (D+a)p with D = (p-1)^4, expanded per residue class of p mod 4
    return np.where(ps % 4 == 3, 5 * pf**3 - 6 * pf**2 + 5 * pf, 5 * pf**3 - 14 * pf**2 + 9 * pf)


@lru_cache(maxsize=4)
def c3_c4(pmax: int = C3C4_PMAX) -> tuple[RInterval, RInterval]:
    """Enclosures of c3 = prod_{p>5} (1+1/c(p))/(1+1/(p-1)) and c4 = prod_{p>5} (1 + a(p)/(p-1)^4)."""
    ps = arith.primes_up_to(pmax)
    ps = ps[ps > 5]
    pf = ps.astype(np.float64)
    D = (pf - 1) ** 4
    a = np.where(ps % 4 == 3, -((pf + 1) ** 2), 3 * pf**2 - 2 * pf - 1)
    lo4, hi4 = one_plus_ratio_bounds(a, D)
    lo3, hi3 = one_plus_ratio_bounds(_c3_dev_numerator(pf, ps), (D + a) * pf)
    P = pmax
    K4 = Fraction(3 * (P + 1) ** 2, P * P)
    K3 = Fraction(5 * (P + 1) ** 2, P * P) / (1 - Fraction((P + 2) ** 2, P**4))
    c4 = prod_positive(lo4, hi4) * exp(_log_tail(K4, P, K4 / (P * P)))
    c3 = prod_positive(lo3, hi3) * exp(_log_tail(K3, P, K3 / (P * P)))
    return c3, c4


# ------------------------------------------------- e3 truncation vs e5 product
def a_local_values(n: int, p: int) -> list[Fraction]:
    """Nonzero A(n, p^k), k >= 1 (k <= 3 for p = 2, k = 1 for odd p)."""
    if p == 2:
        return [localsums.a_of(n, 2**j) for j in (1, 2, 3)]
    return [localsums.a_of_closed(n, p)]


def truncated_q_sum(n: int, Q0: int) -> tuple[RInterval, RInterval]:
    """sum_{q <= Q0} A(n, q) and a rigorous bound on the omitted part.

    A(n, q) is multiplicative in q and vanishes unless q = 2^j s with j <= 3
    and s odd squarefree.  The omitted part is bounded by Rankin's trick,
    sum_{q > Q0} |A(q)| <= Q0^-s prod_p (1 + sum_k |A(p^k)| p^(ks)), optimized over s.
    """
    ps = [int(p) for p in arith.primes_up_to(max(Q0, 3))]
    local = {p: a_local_values(n, p) for p in ps}
    # depth-first over squarefree odd parts
    terms: list[Fraction] = []
    twos = [(1, Fraction(1))] + [(2**j, v) for j, v in zip((1, 2, 3), local[2])]

    def walk(start: int, s: int, val: Fraction) -> None:
        for m2, v2 in twos:
            if s * m2 <= Q0:
                terms.append(val * v2)
        for i in range(start, len(ps)):
            p = ps[i]
            if p == 2:
                continue
            if s * p > Q0:
                break
            walk(i + 1, s * p, val * local[p][0])

    walk(0, 1, Fraction(1))
    total = RInterval(0)
    los, his = [], []
    for t in terms:
        iv = RInterval(t)
        los.append(iv.lo)
        his.append(iv.hi)
    total = RInterval(math.nextafter(math.fsum(los), -math.inf), math.nextafter(math.fsum(his), math.inf))
    return total, _rankin_tail(n, Q0, local)


def _rankin_tail(n: int, Q0: int, local: dict[int, list[Fraction]]) -> RInterval:
    best = math.inf
    P = max(local)
    K, _ = _local_pk_bound(P)
    for s in (0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.6):
        log_prod = 0.0
        for p, vals in local.items():
            log_prod += math.log1p(sum(abs(float(v)) * p ** (s * k) for k, v in enumerate(vals, 1)))
        # primes above P: |A| <= K/(p-1)^2, sum_{m >= P} m^(s-2) <= P^(s-1)/(1-s) + P^(s-2)
        rest = float(K) * ((P ** (s - 1)) / (1 - s) + P ** (s - 2)) * (1 + 1 / P) ** s
        best = min(best, math.exp(log_prod + rest) * Q0 ** (-s))
    # generous relative pad for the float evaluation of the bound
    bound = best * (1 + 1e-9)
    return RInterval(-bound, bound)


# ----------------------------------------------- weighted sums over r_7(h)
SUM_R7_L_RANGE = (10, 18)


@dataclass
class R7Report:
    L: int
    mode: str
    lhs: RInterval
    ratio: RInterval  # lhs / L^14
    rhs_constant: float | RInterval
    symmetric: bool
    zero_unless_3: bool
    support: tuple[int, int]


def _product_weights(H: int) -> np.ndarray:
    """F[m] = prod_{p | m, p > 5} (1 + 1/c(p)) for 0 <= m <= H (F[0] unused)."""
    F = np.ones(H + 1, dtype=np.float64)
    ps = arith.primes_up_to(max(H, 7))
    ps = ps[(ps > 5) & (ps <= H)]
    pf = ps.astype(np.float64)
    D = (pf - 1) ** 4
    a = np.where(ps % 4 == 3, -((pf + 1) ** 2), 3 * pf**2 - 2 * pf - 1)
    b = np.where(ps % 4 == 3, (pf - 1) * (pf + 1) ** 2, (pf - 1) * (pf**2 + 6 * pf + 1))
    ratio = (D + b) / (D + a)
    for p, r in zip(ps.tolist(), ratio.tolist()):
        F[p::p] *= r
    return F


def sum_r7_weighted(L: int, mode: str = "lemma42", c0: RInterval | None = None) -> R7Report:
    """Sum over h != 0 of r_7(h) times the kappa-weighted product, scaled by L^14.

    ``lemma42`` uses kappa(h) prod(1 + 1/c(p)); ``lemma43`` uses the bound
    3 c4 kappa~(h) prod(1 + 1/c(p)) with kappa~ = 0 unless 3 | h.  The right-hand
    constant is the printed 0.69 (times 3 for lemma43) unless ``c0`` is given.
    """
    from . import powers2

    lo_L, hi_L = SUM_R7_L_RANGE
    if not lo_L <= L <= hi_L:
        raise DomainError(f"L must lie in [{lo_L}, {hi_L}], got {L}")
    if mode not in ("lemma42", "lemma43"):
        raise DomainError(f"unknown mode {mode!r}")
    hist = powers2.r_t_histogram(7, L)
    r = hist.values
    off = hist.offset
    H = r.size - 1 - off
    m = np.abs(np.arange(r.size, dtype=np.int64) - off)
    F = _product_weights(H)
    k5 = np.array([3 / 2, 40 / 32, 10 / 32, 10 / 32, 40 / 32])  # kappa by |h| mod 5
    w = k5[m % 5] * F[m]
    w[off] = 0.0
    if mode == "lemma43":
        w[m % 3 != 0] = 0.0
    symmetric = bool(np.array_equal(r, r[::-1]) and np.array_equal(w, w[::-1]))
    zero_unless_3 = bool(mode == "lemma42" or not np.any(w[(m % 3 != 0) & (r > 0)]))
    total = float(np.dot(r.astype(np.float64), w))
    # nonnegative terms: relative error of the dot product is at most (n + 64) u
    pad = (r.size + 64) * 2.0**-52
    lhs = RInterval(total * (1 - pad), total * (1 + pad))
    if mode == "lemma43":
        lhs = 3 * c3_c4()[1] * lhs
    base = c0 if c0 is not None else 0.69
    rhs = 3 * base if mode == "lemma43" else base
    return R7Report(L, mode, lhs, lhs / (L**14), rhs, symmetric, zero_unless_3, hist.support)
