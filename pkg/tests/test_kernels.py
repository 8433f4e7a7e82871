import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sqpow2 import _pykernels, kernels

BACKENDS = kernels.backends()


def test_compiled_backend_available():
    # the extension is part of the build; the fallback must still exist
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_powersum_counts_bruteforce(name):
    impl = BACKENDS[name]
    q, shifts, t = 9, np.array([2, 4, 8, 7, 5, 1]), 3
    counts = impl.powersum_counts(q, shifts, t, 0)
    ref = np.zeros(q, dtype=np.int64)
    for tup in itertools.product(shifts.tolist(), repeat=t):
        ref[sum(tup) % q] += 1
    assert counts.tolist() == ref.tolist()


@given(st.integers(3, 200), st.integers(1, 4), st.integers(0, 2**20))
def test_backends_agree(q, t, seed):
    rng = np.random.default_rng(seed)
    shifts = rng.integers(0, q, size=rng.integers(1, 12))
    outs = [b.powersum_counts(q, shifts, t, 0).tolist() for b in BACKENDS.values()]
    assert all(o == outs[0] for o in outs)
    mod = [b.powersum_counts(q, shifts, t, 1_000_003).tolist() for b in BACKENDS.values()]
    assert all(m == [x % 1_000_003 for x in outs[0]] for m in mod)


def test_sum_squares_exact_large():
    c = np.array([2**40, 3, 2**63 - 1], dtype=np.uint64)
    want = sum(int(x) ** 2 for x in c)
    for b in BACKENDS.values():
        assert b.sum_squares(c) == want


def test_expsum_table_backends_agree():
    q = 15015
    shifts = np.array([pow(2, s, q) for s in range(1, 61)])
    outs = [b.expsum_table(q, shifts) for b in BACKENDS.values()]
    for re, im in outs[1:]:
        assert np.max(np.abs(re - outs[0][0])) < 1e-9
        assert np.max(np.abs(im - outs[0][1])) < 1e-9


@given(st.integers(1, 60), st.integers(0, 3000), st.integers(1, 500))
def test_square_pair_block_bruteforce(P, s0, span):
    w = np.arange(P + 1, dtype=np.int64) % 5
    s1 = s0 + span
    ref = np.zeros(span, dtype=np.int64)
    for x1 in range(1, P + 1):
        for x2 in range(1, P + 1):
            s = x1 * x1 + x2 * x2
            if s0 <= s < s1:
                ref[s - s0] += w[x1] * w[x2]
    for b in BACKENDS.values():
        assert b.square_pair_block(w, s0, s1).tolist() == ref.tolist()


def test_pure_module_is_fallback():
    assert _pykernels.powersum_counts(3, [1, 2], 1).tolist() == [0, 1, 1]
