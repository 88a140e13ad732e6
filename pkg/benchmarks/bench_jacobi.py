"""Batched complex Jacobi: numba kernel vs numpy fallback.

    python3 benchmarks/bench_jacobi.py [--n 20000] [--d 2 3 4] [--repeat 3]

Both paths run in one process; the numba kernel is warmed up before timing.
Agreement of the eigenvalues is reported next to the timings.
"""
import argparse
import time

import numpy as np

from opalg import _kernels


def random_hermitian(n, d, rng):
    z = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    return 0.5 * (z + np.conj(np.swapaxes(z, 1, 2)))


def best_of(fn, hs, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(hs)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--d", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"{'d':>3} {'n':>8} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8} {'max |dw|':>10}")
    for d in args.d:
        hs = random_hermitian(args.n, d, rng)
        _kernels.jacobi_eigh_batch_numba(hs[:2])  # compile
        t_np, (w_np, _, _) = best_of(_kernels.jacobi_eigh_batch_numpy, hs, args.repeat)
        t_nb, (w_nb, _, _) = best_of(_kernels.jacobi_eigh_batch_numba, hs, args.repeat)
        diff = float(np.max(np.abs(w_np - w_nb)))
        print(f"{d:>3} {args.n:>8} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
