"""Archimedean side and brute-force counts.

Singular integrals are computed as densities: with y = x^2 pushed forward
from the window, the density of y is f(y) = 1/(2 sqrt y).  Bracketing f
between step functions on a fine grid and convolving the brackets exactly
gives two-sided bounds, because convolution of nonnegative functions is
monotone.  No oscillatory quadrature is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import arith, kernels, series
from .errors import DomainError, ResourceError
from .interval import EXP_GAMMA, CInterval, RInterval, log

CELLS_PER_ETA = 4000
COUNT_N_CAP = 10**9
LEMMA_J_CAP = 10**5
_FLOAT_PAD = 1e-9  # relative, covers float convolution and quadrature rounding
_BLOCK = 1 << 22


# -------------------------------------------------------------- g(beta)
def _window(eta: float, variant: str) -> tuple[float, float]:
    if not 0 < eta < 0.2:
        raise DomainError("eta must lie in (0, 0.2)")
    if variant == "plain":
        w = eta
    elif variant == "plus":
        w = eta + eta * eta
    else:
        raise DomainError(f"unknown variant {variant!r}")
    return math.sqrt(0.25 - w), math.sqrt(0.25 + w)


def g_eval(beta: float, eta: float, variant: str = "plain", tol: float = 1e-12) -> CInterval:
    """Enclosure of the integral of e(x^2 beta) over the window, by composite Simpson.

    With phi = 2 pi beta x^2 the fourth derivative of e^{i phi} is bounded by
    phi'^4 + 6 phi'^2 phi'' + 3 phi''^2 (phi''' = 0), which gives the remainder.
    """
    x0, x1 = _window(eta, variant)
    width = x1 - x0
    if beta == 0:
        return CInterval(RInterval(math.nextafter(width, -math.inf), math.nextafter(width, math.inf)), 0)
    d1 = 4 * math.pi * abs(beta) * x1
    d2 = 4 * math.pi * abs(beta)
    m4 = d1**4 + 6 * d1 * d1 * d2 + 3 * d2 * d2
    n = max(2, math.ceil((width**5 * m4 / (180 * tol)) ** 0.25))
    n += n % 2
    if n > 10**7:
        raise ResourceError("beta too large for the quadrature budget")
    x = np.linspace(x0, x1, n + 1)
    ph = 2 * math.pi * beta * x * x
    wts = np.ones(n + 1)
    wts[1:-1:2] = 4
    wts[2:-1:2] = 2
    hstep = width / n
    re = hstep / 3 * math.fsum(wts * np.cos(ph))
    im = hstep / 3 * math.fsum(wts * np.sin(ph))
    err = width * hstep**4 * m4 / 180 + 1e-13 * width
    return CInterval(RInterval.around(re, err), RInterval.around(im, err))


def g_decay_bound(beta: float, eta: float, variant: str = "plain") -> float:
    """min(window length, 1/(2 pi |beta| x0)) from one integration by parts."""
    x0, x1 = _window(eta, variant)
    if beta == 0:
        return x1 - x0
    return min(x1 - x0, 1 / (2 * math.pi * abs(beta) * x0))


# ------------------------------------------------------- singular integrals
@dataclass(frozen=True)
class _Steps:
    start: float
    delta: float
    lo: np.ndarray
    hi: np.ndarray


def _steps(eta_w: float, delta: float) -> _Steps:
    a, b = 0.25 - eta_w, 0.25 + eta_w
    n = math.ceil((b - a) / delta - 1e-9)
    left = a + delta * np.arange(n)
    right = left + delta
    f = lambda y: 0.5 / np.sqrt(y)  # noqa: E731
    hi = np.nextafter(f(left), np.inf) * (1 + 1e-15)
    lo = np.where(right <= b, np.nextafter(f(np.minimum(right, b)), -np.inf) * (1 - 1e-15), 0.0)
    return _Steps(a, delta, lo, hi)


@dataclass(frozen=True)
class _PL:
    """Piecewise-linear function with knots start + k*delta."""

    start: float
    delta: float
    values: np.ndarray

    def knots(self) -> np.ndarray:
        return self.start + self.delta * np.arange(self.values.size)


def _pair(s1: _Steps, s2: _Steps, which: str) -> _PL:
    c1 = getattr(s1, which)
    c2 = getattr(s2, which)
    # box_i * box_j is a hat of height delta centered at start + (i + j + 1) delta
    v = np.zeros(c1.size + c2.size + 1)
    v[1:-1] = s1.delta * np.convolve(c1, c2)
    return _PL(s1.start + s2.start, s1.delta, v)


def _pl_dot(F: _PL, G: _PL, h: float, sign: int) -> float:
    """integral of F(s) G(sign * (h - s)) ds, exact for piecewise-linear inputs."""
    kf = F.knots()
    kg = G.knots()
    kg_s = h - sign * kg
    lo = max(kf[0], min(kg_s[0], kg_s[-1]))
    hi = min(kf[-1], max(kg_s[0], kg_s[-1]))
    if hi <= lo:
        return 0.0
    pts = np.union1d(kf, kg_s)
    pts = pts[(pts >= lo) & (pts <= hi)]
    pts = np.union1d(pts, [lo, hi])
    mids = 0.5 * (pts[:-1] + pts[1:])

    def ev(F_: _PL, x):
        return np.interp(x, F_.knots(), F_.values, left=0.0, right=0.0)

    def evg(x):
        return np.interp(sign * (h - x), kg, G.values, left=0.0, right=0.0)

    fa, fm = ev(F, pts), ev(F, mids)
    ga, gm = evg(pts), evg(mids)
    # Simpson on each piece: exact for the quadratic product of two linear pieces
    w = np.diff(pts)
    return math.fsum(w / 6 * (fa[:-1] * ga[:-1] + 4 * fm * gm + fa[1:] * ga[1:]))


@lru_cache(maxsize=16)
def _pairs(eta: float, kind: str, cells: int) -> tuple[_PL, _PL, _PL, _PL]:
    delta = eta / cells
    base = _steps(eta, delta)
    other = _steps(eta + eta * eta, delta) if kind == "Jplus" else base
    return (
        _pair(base, base, "lo"),
        _pair(base, base, "hi"),
        _pair(base, other, "lo"),
        _pair(base, other, "hi"),
    )


def singular_integral(h: float, eta: float, kind: str = "I", cells: int = CELLS_PER_ETA) -> RInterval:
    """Enclosure of the singular integral of the given kind at h.

    I: density at h of y1 + y2 + y3 + y4; J: of y1 + y2 - y3 - y4;
    Jplus: as J with y4 drawn from the wider window (eta + eta^2).
    """
    if kind not in ("I", "J", "Jplus"):
        raise DomainError(f"unknown kind {kind!r}")
    if not 0 < eta < 0.2:
        raise DomainError("eta must lie in (0, 0.2)")
    Alo, Ahi, Blo, Bhi = _pairs(float(eta), kind, cells)
    sign = 1 if kind == "I" else -1
    lo = _pl_dot(Alo, Blo, h, sign)
    hi = _pl_dot(Ahi, Bhi, h, sign)
    if hi == 0.0:
        return RInterval(0)
    return RInterval(max(0.0, lo * (1 - _FLOAT_PAD)), hi * (1 + _FLOAT_PAD))


def singular_integral_mc(h: float, eta: float, kind: str = "I", samples: int = 10**7, seed: int = 1,
                         bandwidth: float | None = None) -> tuple[float, float]:
    """Monte-Carlo estimate (mean, standard error) of the same density via a box kernel."""
    rng = np.random.default_rng(seed)
    x0, x1 = _window(eta, "plain")
    bw = bandwidth if bandwidth is not None else eta / 50
    hits = 0
    done = 0
    chunk = 10**6
    vol = (x1 - x0) ** 4
    if kind == "Jplus":
        p0, p1 = _window(eta, "plus")
        vol = (x1 - x0) ** 3 * (p1 - p0)
    while done < samples:
        m = min(chunk, samples - done)
        y = rng.uniform(x0, x1, size=(3, m)) ** 2
        if kind == "Jplus":
            y4 = rng.uniform(p0, p1, size=m) ** 2
        else:
            y4 = rng.uniform(x0, x1, size=m) ** 2
        s = y[0] + y[1] + y[2] + y4 if kind == "I" else y[0] + y[1] - y[2] - y4
        hits += int(np.count_nonzero(np.abs(s - h) < bw / 2))
        done += m
    p = hits / samples
    scale = vol / bw
    return p * scale, math.sqrt(p * (1 - p) / samples) * scale


# ------------------------------------------------------------ counting
def window_primes(N: int, eta: float) -> np.ndarray:
    lo = math.isqrt(math.ceil((0.25 - eta) * N))
    hi = math.isqrt(math.floor((0.25 + eta) * N))
    ps = arith.primes_up_to(hi + 1)
    ps = ps[(ps * ps >= (0.25 - eta) * N) & (ps * ps <= (0.25 + eta) * N)]
    return ps[ps >= lo]


def _pair_table(ps: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sorted distinct p1^2 + p2^2 over ordered pairs, with counts and log-weights."""
    sq = ps.astype(np.int64) ** 2
    lg = np.log(ps.astype(np.float64))
    s = (sq[:, None] + sq[None, :]).ravel()
    w = (lg[:, None] * lg[None, :]).ravel()
    order = np.argsort(s, kind="stable")
    s, w = s[order], w[order]
    uniq, start, cnt = np.unique(s, return_index=True, return_counts=True)
    wsum = np.add.reduceat(w, start) if s.size else np.zeros(0)
    return uniq, cnt.astype(np.int64), wsum


@dataclass
class TargetRow:
    n: int
    count: int
    weighted: float
    prediction: RInterval | None
    ratio: float | None


@dataclass
class WindowStats:
    N: int
    eta: float
    rows: list[TargetRow]
    mean_ratio: float | None = None
    dispersion: float | None = None
    primes_in_window: int = 0
    extras: dict = field(default_factory=dict)


def _count_targets(uniq: np.ndarray, cnt: np.ndarray, wsum: np.ndarray, n: int) -> tuple[int, float]:
    comp = n - uniq
    idx = np.searchsorted(uniq, comp)
    idx = np.minimum(idx, uniq.size - 1)
    ok = uniq[idx] == comp
    c = int(np.dot(cnt[ok], cnt[idx[ok]]))
    w = math.fsum((wsum[ok] * wsum[idx[ok]]).tolist())
    return c, w


def default_targets(N: int, count: int = 200) -> list[int]:
    n0 = N - ((N - 4) % 24)
    half = count // 2
    return [n0 + 24 * j for j in range(-half, count - half)]


def count4_window(N: int, eta: float = 0.05, targets: list[int] | None = None,
                  full_range: bool = False, pmax: int = 10**4) -> WindowStats:
    """Representations n = p1^2 + ... + p4^2 (ordered) with p_i in the window, and
    the main-term prediction S(n) I(n/N) N for each target.

    ``full_range`` drops the window (all primes with p^2 <= n) and skips predictions.
    """
    if N > COUNT_N_CAP:
        raise ResourceError("N exceeds the counting cap")
    if targets is None:
        targets = default_targets(N)
    if full_range:
        top = max(targets)
        ps = arith.primes_up_to(math.isqrt(top))
    else:
        if not 0.01 <= eta <= 0.1:
            raise DomainError("eta must lie in [0.01, 0.1]")
        ps = window_primes(N, eta)
    uniq, cnt, wsum = _pair_table(ps)
    rows = []
    for n in targets:
        c, w = _count_targets(uniq, cnt, wsum, n)
        pred = ratio = None
        if not full_range:
            if n % 24 != 4:
                raise DomainError(f"target {n} is not 4 mod 24")
            pred = series.singular_series(n, pmax, strict=False).value * singular_integral(n / N, eta) * N
            ratio = w / pred.mid
        rows.append(TargetRow(n, c, w, pred, ratio))
    stats = WindowStats(N, eta, rows, primes_in_window=int(ps.size))
    ratios = [r.ratio for r in rows if r.ratio is not None]
    if ratios:
        stats.mean_ratio = float(np.mean(ratios))
        stats.dispersion = float(np.std(ratios))
    return stats


def count4_bruteforce(n: int) -> tuple[int, float]:
    ps = [int(p) for p in arith.primes_up_to(math.isqrt(n))]
    c = 0
    w = []
    for a in ps:
        for b in ps:
            for d in ps:
                r = n - a * a - b * b - d * d
                if r < 4:
                    continue
                e = math.isqrt(r)
                if e * e == r and arith.is_prime(e):
                    c += 1
                    w.append(math.log(a) * math.log(b) * math.log(d) * math.log(e))
    return c, math.fsum(w)


@dataclass(frozen=True)
class RiegerResult:
    N: int
    eta: float
    total: float
    diagonal: float
    ratio_to_NlogsqN: float


def rieger_sum(N: int, eta: float = 0.05) -> RiegerResult:
    """sum over ordered (p1..p4) in the window with p1^2+p2^2 = p3^2+p4^2 of prod log p_i."""
    if N > COUNT_N_CAP:
        raise ResourceError("N exceeds the counting cap")
    ps = window_primes(N, eta)
    _, _, wsum = _pair_table(ps)
    total = math.fsum((wsum * wsum).tolist())
    diag = math.fsum((np.log(ps.astype(np.float64)) ** 2).tolist()) ** 2
    return RiegerResult(N, eta, total, diag, total / (N * math.log(N) ** 2))


# ------------------------------------------------------------ lemma J
@dataclass(frozen=True)
class QuadCount:
    P: int
    J_total: int
    J_diag: int
    J_offdiag: int


def lemma_j(P: int, block: int = _BLOCK) -> QuadCount:
    """J = sum over x1^2+x2^2 = x3^2+x4^2, 1 <= x_i <= P, of tau(x1)tau(x2)tau(x3)tau(x4)."""
    if not 1 <= P <= LEMMA_J_CAP:
        raise DomainError(f"P must lie in [1, {LEMMA_J_CAP}]")
    tau = arith.divisor_count_table(P).astype(np.int64)
    tau[0] = 0
    total = 0
    top = 2 * P * P + 1
    for s0 in range(2, top, block):
        w = kernels.square_pair_block(tau, s0, min(s0 + block, top))
        nz = w[w != 0]
        for start in range(0, nz.size, 1 << 16):
            c = nz[start : start + (1 << 16)]
            if c.size and int(np.abs(c).max()) < 2**24:
                total += int(np.dot(c, c))
            else:
                total += sum(int(v) * int(v) for v in c)
    diag = sum(int(t) * int(t) for t in tau[1:]) ** 2
    return QuadCount(P, total, diag, total - diag)


# ------------------------------------------------------------ Mertens
@dataclass(frozen=True)
class MertensResult:
    z: int
    product: RInterval
    reference: RInterval
    ratio: RInterval
    exact: Fraction | None


def mertens_check(z: int) -> MertensResult:
    """prod_{p<z} (1 - 1/p) as an exact rational, against e^-gamma / log z."""
    if z < 3:
        raise DomainError("z must be >= 3")
    ps = [int(p) for p in arith.primes_up_to(z - 1)]
    num = math.prod(p - 1 for p in ps)
    den = math.prod(ps)
    exact = Fraction(num, den)
    prod = RInterval(exact)
    ref = 1 / (EXP_GAMMA * log(z))
    return MertensResult(z, prod, ref, prod / ref, exact if z <= 10**4 else None)
