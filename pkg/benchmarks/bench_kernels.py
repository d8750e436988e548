"""Benchmark the compiled elimination kernel against the pure-Python one.

Usage:
    python benchmarks/bench_kernels.py [--sizes 50,100,200,400] [--mod 2]

The two kernels share a contract (in-place reduced row echelon form over
F_p); this script times them on the same random matrices and checks they
produce identical results.  An end-to-end census timing for the active
kernel is printed last; rerun with QUIVERTILT_PURE_KERNEL=1 to compare.
"""

import argparse
import time

import numpy as np

from quivertilt import _fpkernel_py
from quivertilt.linalg import KERNEL_NAME

try:
    from quivertilt import _fpkernel

    COMPILED = _fpkernel
except ImportError:
    COMPILED = None


def time_kernel(kernel, mats, p):
    best = float("inf")
    for _ in range(3):
        copies = [m.copy() for m in mats]
        t0 = time.perf_counter()
        pivots = [kernel.rref_mod(m, p) for m in copies]
        best = min(best, time.perf_counter() - t0)
    return best, copies, pivots


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="50,100,200,400")
    ap.add_argument("--mod", type=int, default=2)
    ap.add_argument("--batch", type=int, default=5)
    args = ap.parse_args()
    p = args.mod
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(12345)
    print(f"rref over F_{p}, batches of {args.batch} square matrices, best of 3")
    print(f"{'size':>6} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for n in sizes:
        mats = [rng.integers(0, p, size=(n, n)).astype(np.int64) for _ in range(args.batch)]
        t_py, red_py, piv_py = time_kernel(_fpkernel_py, mats, p)
        if COMPILED is None:
            print(f"{n:>6} {t_py * 1e3:>10.2f}ms {'(missing)':>12}")
            continue
        t_c, red_c, piv_c = time_kernel(COMPILED, mats, p)
        assert piv_c == piv_py, "kernels disagree on pivots"
        for a, b in zip(red_c, red_py):
            assert (a == b).all(), "kernels disagree on the reduced form"
        print(f"{n:>6} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms {t_py / t_c:>8.1f}x")

    # end-to-end: a census under the active kernel
    from quivertilt.algebra import Quiver, build_algebra, make_path
    from quivertilt.census import census

    q = Quiver(
        ["1", "2", "3"],
        [("x1", "1", "2"), ("y1", "1", "2"), ("x2", "2", "3"), ("y2", "2", "3")],
    )
    rels = [[(1, make_path(q, ["x1", "x2"]))], [(1, make_path(q, ["y1", "y2"]))]]
    alg = build_algebra(q, rels, p=2)
    t0 = time.perf_counter()
    cens = census(alg, (2, 2, 2))
    dt = time.perf_counter() - t0
    print(f"\nend-to-end census (active kernel: {KERNEL_NAME}): "
          f"{len(cens)} classes in {dt:.2f}s")
    print("rerun with QUIVERTILT_PURE_KERNEL=1 to time the fallback")


if __name__ == "__main__":
    main()
