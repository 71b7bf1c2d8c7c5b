"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs each hot kernel on representative sizes with both backends and prints
a timing table plus the max deviation between the two results.  The chain
contraction is included with its staged (BLAS) production path and the
numba term-loop variant for reference.

Usage:  python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from gweyl import _accel
from gweyl._kernels import (
    _bargmann_pair_table_numpy,
    _chain_contract_numpy,
    _hermite_table_numpy,
    _pair_coeffs,
    _wigner_pair_table_numpy,
    sqrt_factorials,
)


def timeit(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not _accel._HAVE_NUMBA:
        print("numba is not importable; only the numpy path can run")
        return

    from gweyl._kernels import (
        _bargmann_pair_table_numba,
        _chain_contract_numba,
        _hermite_table_numba,
        _wigner_pair_table_numba,
    )

    rng = np.random.default_rng(0)
    rows = []

    # hermite recurrence
    t = rng.normal(size=200000)
    deg = 60
    _hermite_table_numba(t[:10], deg)  # compile
    tn, a = timeit(lambda: _hermite_table_numba(t, deg), args.repeat)
    tp, b = timeit(lambda: _hermite_table_numpy(t, deg), args.repeat)
    rows.append(("hermite_table (200k pts, deg 60)", tn, tp,
                 float(np.abs(a - b).max())))

    # pair transform table
    s = rng.normal(size=20000) + 1j * rng.normal(size=20000)
    deg = 16
    coef = _pair_coeffs(deg)
    _wigner_pair_table_numba(s[:10], deg, coef)
    tn, a = timeit(lambda: _wigner_pair_table_numba(s, deg, coef), args.repeat)
    tp, b = timeit(lambda: _wigner_pair_table_numpy(s, deg), args.repeat)
    rows.append(("wigner_pair_table (20k pts, deg 16)", tn, tp,
                 float(np.abs(a - b).max())))

    # anti-holomorphic pair table
    sf = sqrt_factorials(deg)
    _bargmann_pair_table_numba(s[:10], deg, sf)
    tn, a = timeit(lambda: _bargmann_pair_table_numba(s, deg, sf), args.repeat)
    tp, b = timeit(lambda: _bargmann_pair_table_numpy(s, deg), args.repeat)
    rows.append(("bargmann_pair_table (20k pts, deg 16)", tn, tp,
                 float(np.abs(a - b).max())))

    # chain contraction: staged numpy vs numba term loop
    D, nmax, d = 4, 8, 4
    moff = 2 * nmax
    U = rng.normal(size=(D, 2 * moff + 1, d, d)) \
        + 1j * rng.normal(size=(D, 2 * moff + 1, d, d))
    a_bonds = rng.normal(size=(D - 1, 2 * nmax + 1)) \
        + 1j * rng.normal(size=(D - 1, 2 * nmax + 1))
    ns = np.arange(2 * nmax + 1) - nmax
    grids = np.meshgrid(*([ns] * (D - 1)), indexing="ij")
    terms = np.stack([g.ravel() for g in grids], axis=-1).astype(np.int64)
    _chain_contract_numba(U, a_bonds, moff, nmax, terms[:5])
    tn, a = timeit(lambda: _chain_contract_numba(U, a_bonds, moff, nmax, terms),
                   args.repeat)
    tp, b = timeit(lambda: _chain_contract_numpy(U, a_bonds, moff, nmax),
                   args.repeat)
    rows.append(("chain_contract (4 sites, n<=8, deg 3)", tn, tp,
                 float(np.abs(a - b).max())))

    print(f"{'kernel':42s} {'numba':>10s} {'numpy':>10s} {'ratio':>7s} "
          f"{'max |diff|':>11s}")
    for name, tn, tp, diff in rows:
        print(f"{name:42s} {tn * 1e3:9.2f}ms {tp * 1e3:9.2f}ms "
              f"{tp / tn:6.2f}x {diff:11.2e}")
    print("\n(ratio > 1: numba faster; the chain contraction's production "
          "path is the staged numpy one)")


if __name__ == "__main__":
    main()
