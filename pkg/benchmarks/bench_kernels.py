"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--n 13000] [--grid 4096] [--repeat 3]

n defaults to roughly 18 months of hourly data, the size of one station
series in a typical run.
"""
import argparse
import time

import numpy as np

from fsclust import _pykernels

try:
    from fsclust import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=13_000)
    ap.add_argument("--grid", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    x = np.random.default_rng(args.seed).standard_normal(args.n)
    g, h = 0.3, 0.17
    points = np.linspace(x.min() - 8 * h, x.max() + 8 * h, args.grid)
    cases = [
        ("pair_hermite_sum r=4", lambda m: lambda: m.pair_hermite_sum(x, g, 4)),
        ("pair_hermite_sum r=6", lambda m: lambda: m.pair_hermite_sum(x, g, 6)),
        ("kde_grid", lambda m: lambda: m.kde_grid(x, h, points)),
    ]
    backends = [("numpy", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled extension not built; timing numpy only")

    print(f"n={args.n} grid={args.grid} best of {args.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for label, make in cases:
        row, results = [], []
        for _, mod in backends:
            t, out = best_of(make(mod), args.repeat)
            row.append(t)
            results.append(np.atleast_1d(np.asarray(out, dtype=float).ravel()))
        line = f"{label:<22}" + "".join(f"{t:>11.3f}s" for t in row)
        if len(row) == 2:
            agree = np.allclose(results[0], results[1], rtol=1e-10, atol=0)
            line += f"{row[0] / row[1]:>9.2f}x" + ("" if agree else "  MISMATCH")
        print(line)


if __name__ == "__main__":
    main()
