#!/usr/bin/env python3
"""Throughput comparison of the simulation backends.

Runs identical trial batches through the compiled kernel and the pure-Python
fallback, checks they agree byte-for-byte, and reports trials/second.

Usage: python benchmarks/bench_kernels.py [--trials 20000] [--seed 1]
"""

import argparse
import time

import numpy as np

import wurmac.sim as sim
from wurmac.core import FrameConfig, HorizonConfig, PowerProfile, TrafficConfig

SCENARIOS = (
    ("light load, Q=1", 1, 10.0),
    ("nominal, Q=4", 4, 15.0),
    ("saturated, Q=7", 7, 50.0),
)


def bench(backend: str, kp, horizon, n_trials: int, seed: int) -> tuple[float, np.ndarray]:
    t0 = time.perf_counter()
    out = sim.run_trials(kp, horizon, n_trials, seed, backend=backend)
    return time.perf_counter() - t0, out


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--pytrials", type=int, default=2_000,
                        help="trial count for the pure-Python pass")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    if not sim._HAS_COMPILED:
        print("compiled kernel not available; only timing the pure-Python path")

    power = PowerProfile(1e-3, 50e-3, 55e-3)
    horizon = HorizonConfig(10)
    print(f"{'scenario':<20} {'backend':<10} {'trials':>8} {'time':>9} {'trials/s':>12}")
    for label, Q, lam in SCENARIOS:
        frame = FrameConfig(0.25e-3, 41, 4, 1, Q, 4 / 7, 3 / 7)
        traffic = TrafficConfig(40, lam, lam)
        kp = sim.wur_params(frame, traffic, power)

        dt_py, out_py = bench("python", kp, horizon, args.pytrials, args.seed)
        print(f"{label:<20} {'python':<10} {args.pytrials:>8} {dt_py:>8.3f}s "
              f"{args.pytrials / dt_py:>12.0f}")
        if sim._HAS_COMPILED:
            dt_c, out_c = bench("compiled", kp, horizon, args.trials, args.seed)
            print(f"{label:<20} {'compiled':<10} {args.trials:>8} {dt_c:>8.3f}s "
                  f"{args.trials / dt_c:>12.0f}")
            same = np.array_equal(out_py, out_c[: args.pytrials])
            speedup = (args.pytrials / dt_py) and (args.trials / dt_c) / (args.pytrials / dt_py)
            print(f"{'':<20} agree on shared prefix: {same}   speedup: {speedup:,.0f}x")


if __name__ == "__main__":
    main()
