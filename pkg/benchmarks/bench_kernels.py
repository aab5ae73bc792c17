"""Benchmark the compiled kernels against the pure-Python reference.

Times the three hot kernels (simultaneous root iteration, many-point
polynomial evaluation, compensated log-sum) backend against backend in
one process, then the end-to-end root finder in fresh subprocesses so
the import-time backend selection is exercised as users see it.

Run from a checkout with the package installed:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 9 --degree 400
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
from time import perf_counter

import numpy as np

from mahlerheights._kernels import _ref

try:
    from mahlerheights._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = perf_counter()
        fn()
        best = min(best, perf_counter() - start)
    return best


def random_poly(degree, seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(-1000, 1001, size=degree + 1).astype(float)
    coeffs[-1] = coeffs[-1] or 1.0
    return coeffs.tolist()


def start_circle(degree):
    angles = 2 * np.pi * (np.arange(degree) + 0.25) / degree
    return 1.4 * np.exp(1j * angles)


def bench_aberth(repeats, degrees):
    rows = []
    for degree in degrees:
        coeffs = random_poly(degree, seed=degree)
        z0 = start_circle(degree)
        ref = best_of(
            lambda: _ref.aberth_iterate(coeffs, z0.copy(), 200, 1e-13), repeats
        )
        comp = None
        if _core is not None:
            comp = best_of(
                lambda: _core.aberth_iterate(coeffs, z0.copy(), 200, 1e-13),
                repeats,
            )
        rows.append((f"aberth degree {degree}", ref, comp))
    return rows


def bench_pointwise(repeats):
    rng = np.random.default_rng(2024)
    coeffs = rng.standard_normal(65).tolist()
    nodes = np.exp(2j * np.pi * np.arange(1 << 16) / (1 << 16))
    values = rng.standard_normal(1 << 18) + 1j * rng.standard_normal(1 << 18)
    rows = [
        (
            "polyval 2^16 nodes",
            best_of(lambda: _ref.polyval_points(coeffs, nodes), repeats),
            None if _core is None else best_of(
                lambda: _core.polyval_points(coeffs, nodes), repeats
            ),
        ),
        (
            "log_abs_sum 2^18",
            best_of(lambda: _ref.log_abs_sum(values, 1e-300), repeats),
            None if _core is None else best_of(
                lambda: _core.log_abs_sum(values, 1e-300), repeats
            ),
        ),
    ]
    return rows


CHILD = """\
from time import perf_counter
from mahlerheights._kernels import BACKEND
from mahlerheights.poly import IntPoly
from mahlerheights.roots import find_roots
T = IntPoly((0, 1))
P = (T**{degree} - 1) * (T - 2) + 3
find_roots(P)  # warm caches
start = perf_counter()
for _ in range({loops}):
    find_roots(P)
print(BACKEND, (perf_counter() - start) / {loops})
"""


def bench_end_to_end(degree, loops):
    rows = []
    timings = {}
    for forced in ("", "1"):
        env = dict(os.environ, MAHLERHEIGHTS_PURE_PYTHON=forced)
        out = subprocess.run(
            [sys.executable, "-c", CHILD.format(degree=degree, loops=loops)],
            capture_output=True, text=True, env=env, check=True,
        )
        backend, seconds = out.stdout.split()
        timings[backend] = float(seconds)
    rows.append(
        (
            f"find_roots degree {degree + 1}",
            timings.get("python"),
            timings.get("cython"),
        )
    )
    return rows


def print_table(rows):
    print(f"{'kernel':<26} {'python':>10} {'cython':>10} {'speedup':>9}")
    print("-" * 58)
    for name, ref, comp in rows:
        ref_s = f"{ref * 1e3:.3f}ms" if ref is not None else "n/a"
        if comp is None:
            print(f"{name:<26} {ref_s:>10} {'n/a':>10}")
        else:
            comp_s = f"{comp * 1e3:.3f}ms"
            speed = f"{ref / comp:.2f}x" if ref else ""
            print(f"{name:<26} {ref_s:>10} {comp_s:>10} {speed:>9}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--degree", type=int, default=200,
                        help="family degree for the end-to-end benchmark")
    parser.add_argument("--loops", type=int, default=3)
    args = parser.parse_args()

    if _core is None:
        print("compiled backend unavailable; timing the reference only\n")
    rows = bench_aberth(args.repeats, (50, 150, 400))
    rows += bench_pointwise(args.repeats)
    rows += bench_end_to_end(args.degree, args.loops)
    print_table(rows)


if __name__ == "__main__":
    main()
