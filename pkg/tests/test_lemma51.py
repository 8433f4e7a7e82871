import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqpow2 import arith, lemma51, localsums
from sqpow2.errors import DomainError
from sqpow2.interval import RInterval


# ------------------------------------------------------------ prime product
def test_prime_product_targets():
    pp = lemma51.prime_product_51()
    assert pp.head.lo >= 0.904923
    assert pp.C1.lo >= 0.904811
    assert pp.head.width < 1e-6 and pp.C1.width < 1e-6
    assert pp.p_bound == 48611


def test_prime_product_order_independent():
    a = lemma51.prime_product_51()
    b = lemma51.prime_product_51(reverse=True)
    assert (a.head.lo, a.head.hi) == (b.head.lo, b.head.hi)


def test_prime_product_tail_value():
    pp = lemma51.prime_product_51()
    assert pp.tail.contains(Fraction(48609, 48610) ** 6)
    assert not pp.tail.contains(0.99994271)


def test_lower_numerator_is_valid_bound():
    # 1 + A(n,p) >= 1 - num/(p-1)^4 for every n, checked exactly
    for p in (17, 19, 23, 29, 31, 37, 41, 43):
        worst = min(localsums.a_of_closed(n, p) for n in range(p))
        assert worst >= -Fraction(lemma51._lower_numerator(p), (p - 1) ** 4)


# ------------------------------------------------------------ maxexp
def _max_oracle(q):
    mpmath.mp.dps = 30
    rho = arith.mult_order2(q)
    best = 0
    for j in range(1, q):
        s = mpmath.fsum(mpmath.expjpi(mpmath.mpf(2 * j * pow(2, e, q)) / q) for e in range(1, rho + 1))
        best = max(best, abs(s))
    return float(best)


@pytest.mark.parametrize("q,hand", [(3, 1.0), (5, 1.0), (7, math.sqrt(2)), (9, 3.0), (15, None)])
def test_maxexp_small(q, hand):
    r = lemma51.maxexp(q)
    ref = _max_oracle(q)
    assert r.max_abs.lo - 1e-12 <= ref <= r.max_abs.hi + 1e-12
    if hand is not None:
        assert abs(ref - hand) < 1e-12
    assert r.max_abs.hi < r.rho


def test_maxexp_attaining_j_for_9():
    r = lemma51.maxexp(9)
    assert r.attaining_j in (3, 6)


@given(st.integers(1, 400).map(lambda x: 2 * x + 1))
def test_maxexp_below_rho(q):
    if arith.mult_order2(q) == 1:
        return
    assert lemma51.maxexp(q).max_abs.hi < arith.mult_order2(q)


def test_maxexp_15015():
    r = lemma51.maxexp()
    assert r.rho == 60
    assert 34.5 < r.max_abs.lo and r.max_abs.hi < 34.6
    assert r.max_abs.width < 1e-3
    assert r.downstream_ok(lemma51.prime_product_51().C1)


# ------------------------------------------------------------ residues
def test_residue_count_example():
    assert lemma51.residue_count(9, 2, 2).count == 3
    assert lemma51.residue_count_bruteforce(9, 2, 2) == 3


@pytest.mark.parametrize("q3", [3, 9, 15, 21, 33, 45, 63, 93, 99])
def test_residue_count_bruteforce(q3):
    for k in (1, 2, 3, 4):
        if arith.mult_order2(q3) ** k > 10**5:
            continue
        for a in range(0, q3, max(1, q3 // 7)):
            assert lemma51.residue_count(q3, k, a).count == lemma51.residue_count_bruteforce(q3, k, a)


def test_residue_counts_sum_to_rho_power():
    q3, k = 21, 3
    tot = sum(lemma51.residue_count(q3, k, a).count for a in range(q3))
    assert tot == arith.mult_order2(q3) ** k


def test_crt_residue():
    for j in (0, 1, 17, 5004):
        a = lemma51.crt_residue(j)
        assert a % 3 == 0 and a % 5005 == j % 5005


def test_residue_count_15015_band():
    mx = lemma51.maxexp()
    for j in (1, 2, 100, 4000):
        rc = lemma51.residue_count(15015, 35, lemma51.crt_residue(j), mx)
        assert rc.in_band and rc.lower_bound_ok


# ------------------------------------------------------------ identities
@pytest.mark.parametrize("p,total", [(3, 3), (5, 5), (13, 13)])
def test_sum_a_examples(p, total):
    r = lemma51.sum_A_identity(p)
    assert r.total == total and r.holds


def test_sum_a_values_p5():
    assert [localsums.a_of(j, 5) for j in range(1, 6)] == [Fraction(x, 256) for x in (-176, 64, 64, -176, 224)]


def test_sum_a_rejects_composite():
    with pytest.raises(DomainError):
        lemma51.sum_A_identity(9)


# ------------------------------------------------------------ averages
def test_avg_singular_series_smoke():
    rep = lemma51.avg_singular_series(10**6 + 4, 3)
    assert rep.ratio.lo >= 0.5
    assert rep.kept <= rep.tuples


def test_avg_rejects_bad_N():
    with pytest.raises(DomainError):
        lemma51.avg_singular_series(10**6, 2)


# ------------------------------------------------------------ margin
def _inp(k=44, c0=0.69, ratio=1.0):
    return lemma51.MarginInput(k, RInterval(Fraction(str(c0))), RInterval(ratio))


def test_margin_printed_constant():
    m44, kmin = lemma51.final_margin(_inp())
    assert m44.lo > 0 and abs(m44.mid - 0.045) < 0.001
    assert lemma51.margin_at(_inp(), 43).hi < 0
    assert kmin == 44
    assert abs(45 * 0.69 * 0.887167**30 - 0.855) < 0.001


@given(st.integers(15, 200), st.floats(0.3, 0.9))
def test_margin_monotone(k, c0):
    a = lemma51.margin_at(_inp(c0=c0), k)
    b = lemma51.margin_at(_inp(c0=c0), k + 1)
    assert b.lo >= a.lo and b.hi >= a.hi
    c = lemma51.margin_at(_inp(c0=c0 + 0.05), k)
    assert c.hi <= a.hi and c.lo <= a.lo


def test_margin_input_validation():
    with pytest.raises(DomainError):
        lemma51.MarginInput(44, RInterval(0.5), RInterval(1.0), lam=Fraction(1))
    with pytest.raises(DomainError):
        lemma51.MarginInput(44, RInterval(0.5), RInterval(0.5))
