"""Time the numba and numpy implementations of the optimization kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call compiles (or loads from the on-disk cache), so it is run
once before timing. Both backends get identical starts; the script also
reports the largest difference in the minima they find.
"""
import argparse
import time

import numpy as np

from semigroup_forge import _kernels
from semigroup_forge.basis import gell_mann_basis
from semigroup_forge.cp import choi_of_superop
from semigroup_forge.generators import GksGenerator, gks_to_superop


def random_generator(n, rng):
    m = n * n - 1
    a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    c = 0.5 * (a + a.conj().T)
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = 0.5 * (h + h.conj().T)
    h -= np.trace(h) / n * np.eye(n)
    return gks_to_superop(GksGenerator(h, c / np.linalg.norm(c), gell_mann_basis(n))).mat


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--starts", type=int, default=32)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'N':>3}{'numba [ms]':>13}{'numpy [ms]':>13}{'speedup':>9}{'max |dmin|':>12}")
    for n in (2, 3, 4, 6):
        mat = random_generator(n, rng)
        z = rng.normal(size=(2, args.starts, n)) + 1j * rng.normal(size=(2, args.starts, n))
        phis, psis = z[0].copy(), z[1].copy()
        _kernels.pair_descent_numba(mat, phis, psis, 500, 1e-15)
        tn, (vn, _, _) = best_of(lambda: _kernels.pair_descent_numba(mat, phis, psis, 500, 1e-15), args.repeat)
        tp, (vp, _, _) = best_of(lambda: _kernels.pair_descent_numpy(mat, phis, psis, 500, 1e-15), args.repeat)
        print(f"{'pair_descent':<16}{n:>3}{1e3 * tn:>13.2f}{1e3 * tp:>13.2f}{tp / tn:>9.1f}"
              f"{abs(vn.min() - vp.min()):>12.2e}")
    for n in (2, 3, 4):
        c = np.ascontiguousarray(choi_of_superop(np.eye(n * n) + 0.3 * random_generator(n, rng)).mat)
        xs = rng.normal(size=(args.starts, n)) + 1j * rng.normal(size=(args.starts, n))
        ys = rng.normal(size=(args.starts, n)) + 1j * rng.normal(size=(args.starts, n))
        _kernels.product_descent_numba(c, n, n, xs, ys, 200, 1e-15)
        tn, (vn, _, _) = best_of(lambda: _kernels.product_descent_numba(c, n, n, xs, ys, 200, 1e-15), args.repeat)
        tp, (vp, _, _) = best_of(lambda: _kernels.product_descent_numpy(c, n, n, xs, ys, 200, 1e-15), args.repeat)
        print(f"{'product_descent':<16}{n:>3}{1e3 * tn:>13.2f}{1e3 * tp:>13.2f}{tp / tn:>9.1f}"
              f"{abs(vn.min() - vp.min()):>12.2e}")


if __name__ == "__main__":
    main()
