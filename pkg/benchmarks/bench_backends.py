#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Times the four hot kernels on realistic shapes and a full training episode
through each backend, and prints a side-by-side table. Run from the repo
root after installing the package:

    python3 benchmarks/bench_backends.py [--neurons 500] [--repeat 200]
"""

import argparse
import time

import numpy as np

from dreamsnn import kernels
from dreamsnn.trainer import SeedRun, TrainerConfig, run_awake_episode


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_benchmarks(backend, n, repeat):
    rng = np.random.default_rng(0)
    w_rec = rng.normal(0.0, 1.0 / np.sqrt(n), (n, n))
    current = rng.normal(0.0, 5.0, n)
    v = np.full(n, -4.0)
    s = np.zeros(n)
    s_hat = np.zeros(n)
    s_bar = np.zeros(n)
    e = np.zeros(n)
    acc = np.zeros((n, n))
    a = rng.random(n)
    b = rng.random(n)
    z_w = np.zeros((3, n, n))
    z_r = np.zeros((3, n))
    g = rng.normal(size=3)
    p = rng.random(n)

    results = {}
    results["lif_step"] = time_call(
        lambda: backend.lif_step(v, s, s_hat, s_bar, w_rec, current,
                                 0.8, 0.6, 0.8, -4.0, 0.0, 1.0), repeat)
    results["eligibility_step"] = time_call(
        lambda: backend.eligibility_step(e, s_hat, 0.6), repeat)
    results["add_outer"] = time_call(
        lambda: backend.add_outer(acc, a, b), repeat)
    results["policy_trace_step"] = time_call(
        lambda: backend.policy_trace_step(z_w, z_r, g, p, e, s_bar, 0.99),
        repeat)
    return results


def episode_benchmark(repeat):
    config = TrainerConfig(mode="baseline", n_iter=1, n_neurons=500)
    run = SeedRun(config, 0)
    return time_call(lambda: run_awake_episode(run), max(1, repeat // 50))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--neurons", type=int, default=500)
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    names = ["numpy"]
    if kernels.HAVE_EXT:
        names.append("cython")
    else:
        print("compiled extension not available; timing numpy only\n")

    rows = {}
    episode = {}
    for name in names:
        kernels.set_backend(name)
        backend = kernels.active_backend()
        rows[name] = kernel_benchmarks(backend, args.neurons, args.repeat)
        episode[name] = episode_benchmark(args.repeat)

    header = f"{'kernel':<20}" + "".join(f"{n:>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for kernel in rows[names[0]]:
        line = f"{kernel:<20}"
        for name in names:
            line += f"{rows[name][kernel] * 1e6:>12.1f}us"
        if len(names) == 2:
            ratio = rows['numpy'][kernel] / rows['cython'][kernel]
            line += f"{ratio:>9.2f}x"
        print(line)
    line = f"{'awake episode':<20}"
    for name in names:
        line += f"{episode[name] * 1e3:>12.1f}ms"
    if len(names) == 2:
        line += f"{episode['numpy'] / episode['cython']:>9.2f}x"
    print(line)


if __name__ == "__main__":
    main()
