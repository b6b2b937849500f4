"""Benchmark the compiled Jacobi eigensolver against the LAPACK fallback.

Times repeated full eigendecompositions of random Hermitian matrices at
the small sizes the library actually hits in its inner loops.  Run:

    python3 benchmarks/bench_eig.py --sizes 4,8,16,32 --reps 300
"""

import argparse
import time

import numpy as np

from specshift.backend import HAVE_COMPILED, backend_name, eigh, set_backend


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def time_backend(name, mats, reps):
    set_backend(name)
    # warm up once so import/dispatch overhead stays out of the clock
    eigh(mats[0])
    t0 = time.perf_counter()
    for _ in range(reps):
        for m in mats:
            eigh(m)
    return (time.perf_counter() - t0) / (reps * len(mats))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="4,8,12,16,24,32",
                    help="comma-separated matrix sizes")
    ap.add_argument("--reps", type=int, default=200, help="repetitions per size")
    ap.add_argument("--mats", type=int, default=5, help="distinct matrices per size")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not HAVE_COMPILED:
        print("compiled extension not available; nothing to compare")
        return 1

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    old = backend_name()

    print(f"{'n':>4}  {'compiled':>12}  {'python':>12}  {'ratio':>7}")
    try:
        for n in sizes:
            mats = [random_hermitian(rng, n) for _ in range(args.mats)]
            tc = time_backend("compiled", mats, args.reps)
            tp = time_backend("python", mats, args.reps)
            print(f"{n:>4}  {tc * 1e6:>10.1f}us  {tp * 1e6:>10.1f}us  {tp / tc:>6.2f}x")
    finally:
        set_backend(old)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
