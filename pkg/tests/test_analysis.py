import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqpow2 import analysis
from sqpow2.errors import DomainError


# ------------------------------------------------------------ g(beta)
def test_g_at_zero():
    eta = 0.05
    g = analysis.g_eval(0.0, eta)
    assert g.contains(math.sqrt(0.25 + eta) - math.sqrt(0.25 - eta))
    assert analysis.g_eval(0.0, eta, "plus").re.lo > g.re.hi


def _g_mp(beta, eta):
    mpmath.mp.dps = 30
    a, b = mpmath.sqrt(mpmath.mpf(0.25) - eta), mpmath.sqrt(mpmath.mpf(0.25) + eta)
    return complex(mpmath.quad(lambda x: mpmath.expjpi(2 * beta * x * x), [a, b]))


@pytest.mark.parametrize("beta", [0.5, 3.7, -12.25, 40.0])
def test_g_against_mpmath(beta):
    assert analysis.g_eval(beta, 0.05).contains(_g_mp(beta, 0.05))


@given(st.floats(-500, 500).filter(lambda b: abs(b) > 1e-3), st.sampled_from([0.01, 0.05, 0.1]))
def test_g_decay(beta, eta):
    g = analysis.g_eval(beta, eta)
    length = math.sqrt(0.25 + eta) - math.sqrt(0.25 - eta)
    assert g.abs().lo <= min(length, analysis.g_decay_bound(beta, eta)) + 1e-12


# ------------------------------------------------------------ singular integrals
def test_integral_against_irwin_hall():
    eta = 0.01
    v = analysis.singular_integral(1.0, eta)
    oracle = (2 / 3) * (2 * eta) ** 3
    assert abs(v.mid / oracle - 1) < 0.05


def test_integral_chain():
    i1 = analysis.singular_integral(1.0, 0.01, "I")
    j0 = analysis.singular_integral(0.0, 0.01, "J")
    jp = analysis.singular_integral(0.0, 0.01, "Jplus")
    assert i1.hi <= j0.lo or i1.certainly_le(j0)
    assert j0.hi <= jp.lo


@pytest.mark.parametrize("eta", [0.01, 0.05])
def test_integral_against_mc(eta):
    v = analysis.singular_integral(1.0, eta)
    mean, se = analysis.singular_integral_mc(1.0, eta, samples=10**7, seed=7, bandwidth=eta / 100)
    assert abs(mean - v.mid) <= 3 * se + v.width


def test_integral_support():
    eta = 0.02
    assert analysis.singular_integral(1 + 4.2 * eta, eta).hi == 0
    assert analysis.singular_integral(1 - 4.2 * eta, eta).hi == 0
    assert analysis.singular_integral(4.2 * eta, eta, "J").hi == 0
    assert analysis.singular_integral(-4.2 * eta, eta, "J").hi == 0


def test_integral_near_symmetric():
    # the dy/(2 sqrt y) weight breaks exact symmetry; each of the four factors
    # varies by at most sqrt((1/4+eta)/(1/4-eta)) across the window
    eta = 0.02
    skew = ((1 + 4 * eta) / (1 - 4 * eta)) ** 2
    for d in (0.01, 0.03, 0.06):
        a = analysis.singular_integral(1 + d, eta).mid
        b = analysis.singular_integral(1 - d, eta).mid
        assert b / skew <= a <= b * skew
    for d in (0.01, 0.05):
        a = analysis.singular_integral(d, eta, "J")
        b = analysis.singular_integral(-d, eta, "J")
        assert a.overlaps(b)


def test_integral_bad_args():
    with pytest.raises(DomainError):
        analysis.singular_integral(1.0, 0.01, "K")
    with pytest.raises(DomainError):
        analysis.singular_integral(1.0, 0.3)


# ------------------------------------------------------------ counting
@pytest.mark.parametrize("n,count", [(16, 1), (28, 0), (36, 1)])
def test_count4_small(n, count):
    st_ = analysis.count4_window(n, targets=[n], full_range=True)
    assert st_.rows[0].count == count
    assert analysis.count4_bruteforce(n)[0] == count


def test_count4_full_range_matches_loop():
    targets = list(range(4, 2001, 3))
    stats = analysis.count4_window(2000, targets=targets, full_range=True)
    for row in stats.rows:
        c, w = analysis.count4_bruteforce(row.n)
        assert row.count == c
        assert abs(row.weighted - w) <= 1e-9 * max(1.0, w)


def test_count4_window_small_scale():
    stats = analysis.count4_window(10**8, eta=0.05, targets=analysis.default_targets(10**8, 40))
    assert all(r.n % 24 == 4 for r in stats.rows)
    assert 0.5 <= stats.mean_ratio <= 1.5


def test_count4_rejects_bad_target():
    with pytest.raises(DomainError):
        analysis.count4_window(10**6, targets=[10**6 + 1])


def test_rieger_trend_and_monotonicity():
    rs = [analysis.rieger_sum(N) for N in (10**6, 4 * 10**6, 16 * 10**6)]
    ratios = [r.ratio_to_NlogsqN for r in rs]
    assert ratios[-1] <= 2 * ratios[0]
    assert all(r.total >= r.diagonal for r in rs)
    assert analysis.rieger_sum(10**6, 0.1).total > rs[0].total
    assert analysis.rieger_sum(10**6).total == rs[0].total


def _lemma_j_brute(P):
    tau = [0] + [sum(1 for d in range(1, x + 1) if x % d == 0) for x in range(1, P + 1)]
    acc: dict[int, int] = {}
    for a in range(1, P + 1):
        for b in range(1, P + 1):
            acc[a * a + b * b] = acc.get(a * a + b * b, 0) + tau[a] * tau[b]
    return sum(v * v for v in acc.values())


def test_lemma_j_examples():
    assert analysis.lemma_j(1) == analysis.QuadCount(1, 1, 1, 0)
    assert analysis.lemma_j(2) == analysis.QuadCount(2, 33, 25, 8)


@given(st.integers(1, 80))
def test_lemma_j_bruteforce(P):
    assert analysis.lemma_j(P).J_total == _lemma_j_brute(P)


def test_lemma_j_block_independent():
    assert analysis.lemma_j(300, block=997) == analysis.lemma_j(300)


def test_lemma_j_growth():
    vals = [analysis.lemma_j(P).J_total for P in (512, 1024, 2048)]
    assert all(b / a <= 8 for a, b in zip(vals, vals[1:]))


# ------------------------------------------------------------ Mertens
def test_mertens():
    assert analysis.mertens_check(3).exact == Fraction(1, 2)
    m100 = analysis.mertens_check(100)
    assert 0.95 <= m100.ratio.lo and m100.ratio.hi <= 1.05
    assert abs(m100.ratio.mid - 0.987) < 0.001
    m4 = analysis.mertens_check(10**4)
    assert abs(m4.ratio.mid - 1) < abs(m100.ratio.mid - 1)


def test_window_primes():
    ps = analysis.window_primes(10**6, 0.05)
    assert np.all(ps.astype(np.int64) ** 2 >= 0.2 * 10**6)
    assert np.all(ps.astype(np.int64) ** 2 <= 0.3 * 10**6)
