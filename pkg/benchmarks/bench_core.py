"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_core.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from quantspline import _pykernels
from quantspline.kernel import KernelSpec

try:
    from quantspline import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    coeffs = KernelSpec(2).coeffs_K
    cases = []
    for n_lag in (10_000, 1_000_000):
        d = rng.uniform(-2, 2, n_lag)
        cases.append((f"periodic_even_poly  lags={n_lag:>9,}", "periodic_even_poly", (coeffs, d)))
    for n, n_x in ((500, 4096), (2000, 4096), (4000, 16384)):
        theta = rng.standard_normal(n)
        x = rng.uniform(0, 1, n_x)
        cases.append((f"kernel_sum  n={n:>5} points={n_x:>6}", "kernel_sum", (theta, coeffs, x)))

    print(f"{'case':<42}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for label, name, argv in cases:
        py = getattr(_pykernels, name)
        t_py = _best(lambda: py(*argv), args.repeat)
        if _ckernels is None:
            print(f"{label:<42}{t_py * 1e3:>14.2f}{'n/a':>16}{'':>10}")
            continue
        cy = getattr(_ckernels, name)
        t_cy = _best(lambda: cy(*argv), args.repeat)
        assert np.allclose(py(*argv), cy(*argv), rtol=1e-10, atol=1e-14)
        print(f"{label:<42}{t_py * 1e3:>14.2f}{t_cy * 1e3:>16.2f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
