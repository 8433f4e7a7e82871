"""Outward-rounded real and complex intervals.

Endpoints are IEEE doubles.  Every arithmetic result is widened by one ulp on
each side with ``math.nextafter``, which encloses the exact result whatever the
rounding of the underlying operation.  Elementary functions (sqrt aside) rely on
libm being accurate to within one ulp; they are widened by ``LIBM_ULPS``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

LIBM_ULPS = 2
_INF = math.inf

Number = Union[int, float, Fraction]


def _down(x: float, n: int = 1) -> float:
    for _ in range(n):
        x = math.nextafter(x, -_INF)
    return x


def _up(x: float, n: int = 1) -> float:
    for _ in range(n):
        x = math.nextafter(x, _INF)
    return x


def _exact_bounds(x: Number) -> tuple[float, float]:
    """Tightest float pair enclosing an exact int/Fraction/float."""
    if isinstance(x, float):
        return x, x
    f = float(x)  # correctly rounded for int and Fraction
    if isinstance(x, int):
        if math.isfinite(f) and int(f) == x:
            return f, f
    elif Fraction(f) == x:
        return f, f
    return _down(f), _up(f)


class RInterval:
    """Closed real interval ``[lo, hi]`` with outward rounding."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Number, hi: Number | None = None):
        if hi is None:
            lo, hi = _exact_bounds(lo)
        else:
            lo = _exact_bounds(lo)[0]
            hi = _exact_bounds(hi)[1]
        if not lo <= hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # construction -----------------------------------------------------
    @classmethod
    def from_fraction(cls, q: Fraction | int) -> "RInterval":
        return cls(q)

    @classmethod
    def around(cls, mid: float, radius: float) -> "RInterval":
        return cls(_down(mid - radius), _up(mid + radius))

    @staticmethod
    def _coerce(x) -> "RInterval":
        return x if isinstance(x, RInterval) else RInterval(x)

    # inspection -------------------------------------------------------
    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        if isinstance(x, RInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (int, Fraction)):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    def overlaps(self, other: "RInterval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def hull(self, other: "RInterval") -> "RInterval":
        return RInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def __repr__(self) -> str:
        return f"RInterval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RInterval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    # arithmetic -------------------------------------------------------
    def __neg__(self) -> "RInterval":
        return RInterval(-self.hi, -self.lo)

    def __add__(self, other) -> "RInterval":
        o = self._coerce(other)
        return RInterval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "RInterval":
        o = self._coerce(other)
        return RInterval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other) -> "RInterval":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RInterval":
        o = self._coerce(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RInterval(_down(min(ps)), _up(max(ps)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RInterval":
        o = self._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        qs = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return RInterval(_down(min(qs)), _up(max(qs)))

    def __rtruediv__(self, other) -> "RInterval":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "RInterval":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = RInterval(1)
        base = self
        if k % 2 == 0 and self.lo < 0.0 < self.hi:
            m = max(-self.lo, self.hi)
            return RInterval(0.0, (RInterval(m) ** k).hi)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def abs(self) -> "RInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RInterval(0.0, max(-self.lo, self.hi))

    # comparisons that are certain for every point of both intervals
    def certainly_lt(self, other) -> bool:
        return self.hi < self._coerce(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= self._coerce(other).lo

    def certainly_gt(self, other) -> bool:
        return self.lo > self._coerce(other).hi


def sqrt(x: RInterval) -> RInterval:
    """Square root (IEEE sqrt is correctly rounded, one ulp is enough)."""
    if x.lo < 0:
        raise ValueError("sqrt of negative interval")
    return RInterval(max(0.0, _down(math.sqrt(x.lo))), _up(math.sqrt(x.hi)))


def log(x: RInterval | Number) -> RInterval:
    x = RInterval._coerce(x)
    if x.lo <= 0:
        raise ValueError("log of non-positive interval")
    return RInterval(_down(math.log(x.lo), LIBM_ULPS), _up(math.log(x.hi), LIBM_ULPS))


def exp(x: RInterval | Number) -> RInterval:
    x = RInterval._coerce(x)
    return RInterval(max(0.0, _down(math.exp(x.lo), LIBM_ULPS)), _up(math.exp(x.hi), LIBM_ULPS))


def powr(x: RInterval, y: RInterval | Number) -> RInterval:
    """x**y for positive x via exp(y log x)."""
    return exp(log(x) * RInterval._coerce(y))


# Euler's constant and e^gamma.  Decimal expansions from the standard
# tables (gamma = 0.57721566490153286060..., e^gamma = 1.78107241799019798523...);
# enclosures of width 1e-13 around them.
EULER_GAMMA = RInterval(Fraction("0.5772156649015"), Fraction("0.5772156649016"))
EXP_GAMMA = RInterval(Fraction("1.7810724179901"), Fraction("1.7810724179902"))


class CInterval:
    """Rectangular complex interval ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re: RInterval | Number, im: RInterval | Number = 0):
        self.re = RInterval._coerce(re)
        self.im = RInterval._coerce(im)

    def __repr__(self) -> str:
        return f"CInterval({self.re!r}, {self.im!r})"

    def __add__(self, other) -> "CInterval":
        o = other if isinstance(other, CInterval) else CInterval(other)
        return CInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "CInterval":
        o = other if isinstance(other, CInterval) else CInterval(other)
        return CInterval(self.re - o.re, self.im - o.im)

    def __mul__(self, other) -> "CInterval":
        o = other if isinstance(other, CInterval) else CInterval(other)
        return CInterval(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def abs2(self) -> RInterval:
        return self.re ** 2 + self.im ** 2

    def abs(self) -> RInterval:
        return sqrt(self.abs2())

    def contains(self, z: complex | "CInterval") -> bool:
        if isinstance(z, CInterval):
            return self.re.contains(z.re) and self.im.contains(z.im)
        return self.re.contains(z.real) and self.im.contains(z.imag)


def interval_sum(items: Iterable[RInterval]) -> RInterval:
    """Sum with endpoint-wise ``math.fsum`` (correctly rounded) plus one ulp."""
    los, his = [], []
    for it in items:
        los.append(it.lo)
        his.append(it.hi)
    if not los:
        return RInterval(0)
    return RInterval(_down(math.fsum(los)), _up(math.fsum(his)))


def prod_positive(lo: np.ndarray, hi: np.ndarray) -> RInterval:
    """Product of positive intervals ``[lo[i], hi[i]]`` by a fixed pairwise tree.

    The reduction order depends only on the array length, so results are
    bit-reproducible.
    """
    lo = np.asarray(lo, dtype=np.float64).copy()
    hi = np.asarray(hi, dtype=np.float64).copy()
    if lo.size == 0:
        return RInterval(1)
    if np.any(lo <= 0):
        raise ValueError("prod_positive needs strictly positive lower endpoints")
    while lo.size > 1:
        if lo.size % 2:
            lo = np.append(lo, 1.0)
            hi = np.append(hi, 1.0)
        lo = np.nextafter(lo[0::2] * lo[1::2], -np.inf)
        hi = np.nextafter(hi[0::2] * hi[1::2], np.inf)
    return RInterval(float(lo[0]), float(hi[0]))


def one_plus_ratio_bounds(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Enclose ``1 + num/den`` elementwise for integer-valued float arrays.

    ``num`` and ``den`` may have lost exactness in float conversion (values
    above 2**53); a relative pad of 2**-48 on the ratio covers the conversion
    error of both operands and the division.
    """
    x = np.asarray(num, dtype=np.float64) / np.asarray(den, dtype=np.float64)
    pad = np.abs(x) * 2.0 ** -48 + 1e-300
    lo = np.nextafter(1.0 + (x - pad), -np.inf)
    hi = np.nextafter(1.0 + (x + pad), np.inf)
    return lo, hi
