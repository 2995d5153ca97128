#!/usr/bin/env python3
"""Benchmark the compiled quadrature kernel against the pure-Python fallback.

Times the hot loop (weights + ordered pair summation over nodes x times)
for several time-grid sizes on cached transform evaluations, and reports
the agreement between the two backends. Usage:

    python benchmarks/bench_backends.py [--n 200] [--repeat 5]
"""
import argparse
import math
import sys
import time

import numpy as np

from sectlap import ContourConfig, build_nodes, derive_params
from sectlap import _kernels_py
from sectlap.quadrature import LOG_GUARD_CUTOFF

try:
    from sectlap import _kernels
except ImportError:
    _kernels = None


def run_kernel(kernel, times, nodes, values):
    out = np.empty((len(times), values.shape[1]), dtype=np.complex128)
    skipped = np.zeros(len(times), dtype=np.int64)
    kernel.quad_sum(times, nodes.x, nodes.tprime, values, nodes.lam, nodes.h,
                    math.sin(nodes.alpha), math.cos(nodes.alpha),
                    True, LOG_GUARD_CUTOFF, out, skipped)
    return out


def bench(kernel, times, nodes, values, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = run_kernel(kernel, times, nodes, values)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200, help="node half-count")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    n = args.n
    cfg = ContourConfig(alpha=0.7, d=0.6, theta=1.0 - 1.0 / n, n=n, t0=1.0, Lambda=50.0)
    der = derive_params(cfg)
    nodes = build_nodes(cfg.alpha, der, n)
    values = (1.0 / (1.0 + nodes.z))[:, None]  # cached evaluations of 1/(1+z)

    if _kernels is None:
        print("compiled kernel not available; showing pure-Python timings only")
    print(f"{'T (time points)':>16} {'python [ms]':>14} {'compiled [ms]':>14} "
          f"{'speedup':>8} {'max rel diff':>13}")
    for T in (9, 100, 1000, 5000):
        times = np.exp(np.linspace(math.log(1.0), math.log(50.0), T))
        t_py, out_py = bench(_kernels_py, times, nodes, values, args.repeat)
        if _kernels is None:
            print(f"{T:>16d} {1e3 * t_py:>14.3f} {'-':>14} {'-':>8} {'-':>13}")
            continue
        t_c, out_c = bench(_kernels, times, nodes, values, args.repeat)
        denom = np.maximum(np.abs(out_py), 1e-300)
        rel = float(np.max(np.abs(out_c - out_py) / denom))
        print(f"{T:>16d} {1e3 * t_py:>14.3f} {1e3 * t_c:>14.3f} "
              f"{t_py / t_c:>8.1f} {rel:>13.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
