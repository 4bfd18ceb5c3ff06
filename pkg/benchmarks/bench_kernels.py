#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-Python fallbacks.

Runs each hot kernel on a sizable workload with both implementations and
prints a timing table.  The dispatch path used by the library is whatever
LAMTOOL_BACKEND selects; this script calls both implementations directly so
one process can compare them.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

import numpy as np

from lamtool import kernels
from lamtool.substitutions import Substitution, eigenray_prefix


def best_of(repeat, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def build_workloads():
    rng = random.Random(20240801)
    word = np.array([rng.randrange(8) for _ in range(2_000_000)], dtype=np.int32)

    fib = Substitution.from_tokens({"a": ["a", "b"], "b": ["a"]})
    ray = eigenray_prefix(fib, "a", 400_000)
    offsets, data = fib.tables()

    return [
        ("tighten 2M letters", "_tighten", (word,)),
        ("expand 400k-letter word once", "_expand", (ray, offsets, data)),
        ("substring counts, 400k prefix, n<=4000", "_substring_counts",
         (ray, 2, 4000)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"dispatch backend: {kernels.BACKEND}")
    have_numba = kernels.BACKEND == "numba"
    if not have_numba:
        print("numba unavailable or disabled; timing the Python path only")

    rows = []
    for label, stem, work in build_workloads():
        py = getattr(kernels, stem + "_py")
        t_py, ref = best_of(args.repeat, py, *work)
        if have_numba:
            nb = getattr(kernels, stem + "_nb")
            nb(*work)  # compile outside the timed region
            t_nb, out = best_of(args.repeat, nb, *work)
            assert np.array_equal(np.asarray(ref), np.asarray(out)), label
            rows.append((label, t_py, t_nb, t_py / t_nb))
        else:
            rows.append((label, t_py, None, None))

    width = max(len(r[0]) for r in rows)
    header = f"{'kernel':<{width}}  {'python':>10}  {'numba':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, t_py, t_nb, speedup in rows:
        if t_nb is None:
            print(f"{label:<{width}}  {t_py:>9.4f}s  {'-':>10}  {'-':>8}")
        else:
            print(f"{label:<{width}}  {t_py:>9.4f}s  {t_nb:>9.4f}s  "
                  f"{speedup:>7.1f}x")


if __name__ == "__main__":
    main()
