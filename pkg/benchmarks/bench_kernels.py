"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Prints median wall time per call for each backend and the speed-up.
"""
import argparse
import statistics
import time

import numpy as np

from qipkit import _pycore

try:
    from qipkit import _core
except ImportError:
    _core = None


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def cases(rng):
    for dim in (4, 8, 16, 32):
        a = _hermitian(dim, rng)
        yield f"jacobi_eigh dim={dim}", lambda m, a=a: m.jacobi_eigh(a, 1e-12, 100)
    table = np.array([[0.75, 0.25], [0.75, 0.25]])
    for n in (8, 12, 16):
        letters = rng.integers(0, 2, size=(20000, n))
        mask = np.zeros(n + 1, dtype=np.uint8)
        mask[n // 4 : n // 4 + 2] = 1
        yield f"typical_weights n={n} m=20000", lambda m, l=letters, k=mask: m.typical_weights(l, table, k)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':32} {'python (ms)':>12} {'cython (ms)':>12} {'speed-up':>9}")
    for name, call in cases(rng):
        t_py = _time(lambda: call(_pycore), args.repeat)
        if _core is None:
            print(f"{name:32} {t_py * 1e3:12.3f} {'n/a':>12} {'n/a':>9}")
            continue
        t_cy = _time(lambda: call(_core), args.repeat)
        print(f"{name:32} {t_py * 1e3:12.3f} {t_cy * 1e3:12.3f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
