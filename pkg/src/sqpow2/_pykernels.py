"""Pure numpy implementations of the hot loops (fallback backend)."""

from __future__ import annotations

import math

import numpy as np


def powersum_counts(q: int, shifts, t: int, modulus: int = 0) -> np.ndarray:
    sh = np.mod(np.asarray(shifts, dtype=np.int64), q)
    cur = np.zeros(q, dtype=np.uint64)
    cur[0] = 1
    m = np.uint64(modulus)
    for _ in range(t):
        nxt = np.zeros(q, dtype=np.uint64)
        for s in sh:
            nxt += np.roll(cur, int(s))
            if modulus:
                np.subtract(nxt, m, out=nxt, where=nxt >= m)
        cur = nxt
    return cur


def sum_squares(counts: np.ndarray) -> int:
    counts = np.asarray(counts, dtype=np.uint64)
    if counts.size and int(counts.max()) < 2**31:
        # chunked so that no partial sum exceeds 2**63
        total = 0
        for start in range(0, counts.size, 1 << 20):
            c = counts[start : start + (1 << 20)].astype(np.int64)
            total += int(np.dot(c, c))
        return total
    return sum(v * v for v in counts.tolist())


def expsum_table(q: int, shifts) -> tuple[np.ndarray, np.ndarray]:
    sh = np.mod(np.asarray(shifts, dtype=np.int64), q)
    ang = 2.0 * math.pi * np.arange(q, dtype=np.float64) / q
    ct, st = np.cos(ang), np.sin(ang)
    re = np.zeros(q)
    im = np.zeros(q)
    j = np.arange(q, dtype=np.int64)
    for s in sh:
        idx = (j * int(s)) % q
        re += ct[idx]
        im += st[idx]
    return re, im


def square_pair_block(weights: np.ndarray, s0: int, s1: int) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.int64)
    P = weights.size - 1
    out = np.zeros(s1 - s0, dtype=np.int64)
    x = np.arange(1, P + 1, dtype=np.int64)
    sq = x * x
    w = weights[1:]
    for x1 in range(1, P + 1):
        s = x1 * x1
        if s + 1 >= s1:
            break
        w1 = int(weights[x1])
        if w1 == 0:
            continue
        lo = np.searchsorted(sq, s0 - s, side="left")
        hi = np.searchsorted(sq, s1 - s, side="left")
        if hi <= lo:
            continue
        np.add.at(out, s + sq[lo:hi] - s0, w1 * w[lo:hi])
    return out
