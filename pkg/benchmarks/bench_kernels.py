"""Time the numba and numpy paths of the hot kernels side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call compiles (or loads the on-disk cache); it is timed
separately and excluded from the steady-state figures.
"""

import argparse
import time

import numpy as np

from sqfnlab import _kernels
from sqfnlab.martingale import random_martingale


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    x = np.random.default_rng(0).uniform(0.0, 1.0, 200_000)
    trace = random_martingale(np.random.SeedSequence(1), 16, "uniform:1")
    flat = trace.flat()
    n = trace.depth
    return [
        ("lacunary_sum b=2 terms=53, 2e5 pts", lambda: _kernels.lacunary_sum(x, 2.0, 53)),
        ("leaf_stats depth 16", lambda: _kernels.leaf_stats(flat, n)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or disabled); only the numpy path is timed")
    print(f"{'kernel':40s} {'numpy s':>10s} {'numba s':>10s} {'compile s':>10s} {'speedup':>8s}")
    for name, fn in cases():
        _kernels.use_numba(False)
        ref = fn()
        t_np = _best(fn, args.repeat)
        if _kernels.HAVE_NUMBA:
            _kernels.use_numba(True)
            t0 = time.perf_counter()
            got = fn()
            t_compile = time.perf_counter() - t0
            t_nb = _best(fn, args.repeat)
            ref, got = (ref,) if not isinstance(ref, tuple) else ref, (got,) if not isinstance(got, tuple) else got
            for a, b in zip(ref, got):
                np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
            print(f"{name:40s} {t_np:10.4f} {t_nb:10.4f} {t_compile:10.3f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:40s} {t_np:10.4f} {'-':>10s} {'-':>10s} {'-':>8s}")
    if _kernels.HAVE_NUMBA:
        _kernels.use_numba(True)


if __name__ == "__main__":
    main()
