"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--json]
"""

from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from sqpow2 import arith, kernels, powers2


def cases():
    q7 = 15015
    tau = arith.divisor_count_table(20000).astype(np.int64)
    tau[0] = 0
    counts = np.arange(1, 2_000_001, dtype=np.uint64)
    return {
        "powersum_counts(q=15015, t=7)": lambda b: b.powersum_counts(q7, powers2.power_residues(q7), 7, 0),
        "powersum_counts mod p (q=15015, t=35)": lambda b: b.powersum_counts(q7, powers2.power_residues(q7), 35, 2**61 - 1),
        "sum_squares(2M)": lambda b: b.sum_squares(counts),
        "expsum_table(q=15015)": lambda b: b.expsum_table(15015, powers2.power_residues(15015)),
        "square_pair_block(P=20000, 4M sums)": lambda b: b.square_pair_block(tau, 2, 4_000_002),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    bk = kernels.backends()
    rows = []
    for name, fn in cases().items():
        row = {"case": name}
        for label, impl in sorted(bk.items()):
            row[label] = min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat))
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'case':40s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for r in rows:
        cy = f"{r['cython']:12.4f}" if "cython" in r else f"{'n/a':>12s}"
        sp = f"{r['speedup']:9.1f}" if "speedup" in r else f"{'':>9s}"
        print(f"{r['case']:40s} {r['python']:12.4f} {cy} {sp}")


if __name__ == "__main__":
    main()
