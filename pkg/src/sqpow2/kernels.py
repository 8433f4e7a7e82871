"""Hot-loop backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy versions in ``_pykernels``.  Set ``SQPOW2_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SQPOW2_PURE") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def backends() -> dict:
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out


def powersum_counts(q, shifts, t, modulus=0):
    """Counts of t-fold sums of ``shifts`` modulo q, reduced mod ``modulus`` (0 = none).

    With ``modulus == 0`` the caller guarantees ``len(shifts)**t < 2**64``.
    """
    return _impl.powersum_counts(int(q), shifts, int(t), int(modulus))


def sum_squares(counts):
    return _impl.sum_squares(counts)


def expsum_table(q, shifts):
    """Real and imaginary parts of sum_s e(j*s/q) for every j in [0, q)."""
    return _impl.expsum_table(int(q), shifts)


def square_pair_block(weights, s0, s1):
    """sum of w[x1]*w[x2] over x1, x2 >= 1 with x1^2 + x2^2 = s, for s in [s0, s1)."""
    return _impl.square_pair_block(weights, int(s0), int(s1))
