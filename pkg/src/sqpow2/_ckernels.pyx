# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Mirrors ``_pykernels`` function for function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, M_PI

ctypedef unsigned long long u64
ctypedef long long i64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cnp.import_array()


def powersum_counts(i64 q, shifts, int t, u64 modulus=0):
    cdef cnp.ndarray[i64, ndim=1] sh = np.ascontiguousarray(np.mod(shifts, q), dtype=np.int64)
    cdef cnp.ndarray[u64, ndim=1] cur = np.zeros(q, dtype=np.uint64)
    cdef cnp.ndarray[u64, ndim=1] nxt = np.zeros(q, dtype=np.uint64)
    cdef u64[::1] c
    cdef u64[::1] n
    cdef Py_ssize_t i, r, ns = sh.shape[0]
    cdef i64 s
    cdef int step
    cdef u64 v
    cur[0] = 1
    for step in range(t):
        nxt[:] = 0
        c = cur
        n = nxt
        for i in range(ns):
            s = sh[i]
            # n[r] += c[r - s]: r in [s, q) reads c[0 .. q-s), r in [0, s) reads c[q-s .. q)
            if modulus == 0:
                for r in range(s, q):
                    n[r] += c[r - s]
                for r in range(0, s):
                    n[r] += c[r + q - s]
            else:
                for r in range(s, q):
                    v = n[r] + c[r - s]
                    n[r] = v - modulus if v >= modulus else v
                for r in range(0, s):
                    v = n[r] + c[r + q - s]
                    n[r] = v - modulus if v >= modulus else v
        cur, nxt = nxt, cur
    return cur


def sum_squares(cnp.ndarray[u64, ndim=1] counts):
    cdef u128 acc = 0
    cdef u128 x
    cdef Py_ssize_t i, n = counts.shape[0]
    for i in range(n):
        x = counts[i]
        acc += x * x
    cdef u64 hi = <u64>(acc >> 64)
    cdef u64 lo = <u64>acc
    return (int(hi) << 64) | int(lo)


def expsum_table(i64 q, shifts):
    cdef cnp.ndarray[i64, ndim=1] sh = np.ascontiguousarray(np.mod(shifts, q), dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] ct = np.empty(q)
    cdef cnp.ndarray[double, ndim=1] st = np.empty(q)
    cdef cnp.ndarray[double, ndim=1] re = np.zeros(q)
    cdef cnp.ndarray[double, ndim=1] im = np.zeros(q)
    cdef Py_ssize_t j, i, ns = sh.shape[0]
    cdef i64 idx
    cdef double ang
    for j in range(q):
        ang = 2.0 * M_PI * (<double>j) / (<double>q)
        ct[j] = cos(ang)
        st[j] = sin(ang)
    for j in range(q):
        for i in range(ns):
            idx = (j * sh[i]) % q
            re[j] += ct[idx]
            im[j] += st[idx]
    return re, im


def square_pair_block(cnp.ndarray[i64, ndim=1] weights, i64 s0, i64 s1):
    cdef Py_ssize_t P = weights.shape[0] - 1
    cdef cnp.ndarray[i64, ndim=1] out = np.zeros(s1 - s0, dtype=np.int64)
    cdef i64 x1, x2, s, w1, x2lo
    for x1 in range(1, P + 1):
        s = x1 * x1
        if s + 1 >= s1:
            break
        w1 = weights[x1]
        if w1 == 0:
            continue
        # first x2 with x1^2 + x2^2 >= s0
        x2lo = 1
        if s0 - s > 1:
            x2lo = <i64>((s0 - s) ** 0.5)
            if x2lo < 1:
                x2lo = 1
            while x2lo > 1 and s + (x2lo - 1) * (x2lo - 1) >= s0:
                x2lo -= 1
            while s + x2lo * x2lo < s0:
                x2lo += 1
        x2 = x2lo
        while x2 <= P and s + x2 * x2 < s1:
            out[s + x2 * x2 - s0] += w1 * weights[x2]
            x2 += 1
    return out
