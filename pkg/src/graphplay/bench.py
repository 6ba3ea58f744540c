"""Throughput comparison of the two walk-kernel backends.

Runs the same workloads through the numba-compiled loop and the vectorized
numpy fallback and prints checks per second for each.  Usage:

    python -m graphplay.bench [--quick]
"""

import argparse
import itertools
import time

import numpy as np

from . import kernels


def all_paths(n, max_len):
    packed = []
    lengths = []
    for length in range(2, max_len + 1):
        for combo in itertools.product(range(1, n + 1), repeat=length):
            packed.append(list(combo) + [0] * (max_len - length))
            lengths.append(length)
    return np.array(packed, dtype=np.int64), np.array(lengths, dtype=np.int64)


def digraph_from_bits(n, bits):
    adj = np.zeros((n, n), dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            if bits >> (i * n + j) & 1:
                adj[i, j] = True
    return adj


def run_backend(walker, adjs, paths, lengths, label):
    checks = int(lengths.sum() - len(lengths)) * len(adjs)  # hops walked at most
    start = time.perf_counter()
    for adj in adjs:
        walker(adj, paths, lengths)
    elapsed = time.perf_counter() - start
    rate = len(adjs) * len(paths) / elapsed
    print(f"{label:>8}: {elapsed:8.3f} s  {rate:12,.0f} path checks/s  "
          f"(~{checks / elapsed:,.0f} hop lookups/s)")
    return elapsed


def main(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller digraph sample")
    args = parser.parse_args(argv)

    n = 4
    paths, lengths = all_paths(n, 6)
    step = 64 if args.quick else 8
    rng = np.random.default_rng(7)
    adjs = [digraph_from_bits(n, int(bits)) for bits in range(0, 2 ** (n * n), step)]
    print(f"workload: {len(adjs)} digraphs on {n} nodes x {len(paths)} paths each")

    if kernels._walk_loop_jit is not None:
        kernels.walk_paths_numba(adjs[0], paths, lengths)  # compile outside timing
        t_jit = run_backend(kernels.walk_paths_numba, adjs, paths, lengths, "numba")
    else:
        t_jit = None
        print("   numba: not available")
    t_np = run_backend(kernels.walk_paths_numpy, adjs, paths, lengths, "numpy")
    if t_jit:
        print(f"speedup: numba is {t_np / t_jit:.1f}x the numpy fallback here")

    # larger single-shot batch at classroom graph size
    big_n = 10
    big = rng.integers(1, big_n + 2, size=(200_000, 8)).astype(np.int64)
    big_len = rng.integers(2, 9, size=200_000).astype(np.int64)
    adj = rng.random((big_n, big_n)) < 0.3
    print(f"workload: one batch of {len(big)} random paths on {big_n} nodes")
    if kernels._walk_loop_jit is not None:
        run_backend(kernels.walk_paths_numba, [adj], big, big_len, "numba")
    run_backend(kernels.walk_paths_numpy, [adj], big, big_len, "numpy")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
