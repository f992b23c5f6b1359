#!/usr/bin/env python3
"""Throughput comparison of the two kernel implementations.

Times op_string_action and sector_counts in both the numba and the pure
numpy variants over growing mode counts and prints states/second plus
the speedup ratio. Run from the repository root:

    python3 bench/bench_kernels.py
    python3 bench/bench_kernels.py --modes 12 16 20 --repeats 7
"""

import argparse
import statistics
import time

import numpy as np

from fluxlab import kernels


def _time(fn, *args, repeats):
    # one untimed call first: jit compilation, cache warmup
    fn(*args)
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def bench_case(name, variants, args, n_states, repeats):
    times = {label: _time(fn, *args, repeats=repeats) for label, fn in variants}
    line = f"{name:<28}"
    for label, t in times.items():
        line += f"  {label} {n_states / t / 1e6:8.1f} Mstates/s"
    if len(times) == 2:
        (_, first), (_, second) = times.items()
        line += f"  speedup x{second / first:5.1f}"
    print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, nargs="+", default=[12, 16, 20])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args()

    if not kernels.USING_NUMBA:
        print("note: numba path unavailable or disabled; timing numpy only")

    rng = np.random.default_rng(opts.seed)
    for n_modes in opts.modes:
        n_states = 1 << n_modes
        print(f"\nn_modes={n_modes}  n_states={n_states}")
        cases = {
            "hop a+_m a_n": 2,
            "pair a+ a+ a a": 4,
        }
        for name, length in cases.items():
            modes = rng.integers(0, n_modes, size=length).astype(np.int64)
            daggers = np.zeros(length, dtype=np.bool_)
            daggers[: length // 2] = True
            variants = [("numpy", kernels.op_string_action_numpy)]
            if kernels.USING_NUMBA:
                variants.insert(0, ("numba", kernels.op_string_action_numba))
            bench_case(name, variants, (n_states, modes, daggers), n_states, opts.repeats)
        variants = [("numpy", kernels.sector_counts_numpy)]
        if kernels.USING_NUMBA:
            variants.insert(0, ("numba", kernels.sector_counts_numba))
        bench_case("sector_counts", variants, (n_states, n_modes), n_states, opts.repeats)


if __name__ == "__main__":
    main()
