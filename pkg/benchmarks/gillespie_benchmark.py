#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-Python Gillespie kernels.

Both kernels consume the same uniform stream and must agree byte for byte;
this script checks that too. Run:

    python benchmarks/gillespie_benchmark.py [--events N]
"""

import argparse
import json
import time
from fractions import Fraction

from masep.boundary import BoundarySpec, Side
from masep.gillespie import SimConfig, _select_kernel, simulate
from masep.markov import LatticeModel


def benchmark_model():
    return LatticeModel(
        3,
        4,
        Fraction(1, 2),
        BoundarySpec(Side.LEFT, Fraction(1), Fraction(2), 2, 2, 3, 3, n_species_total=3),
        BoundarySpec(Side.RIGHT, Fraction(2), Fraction(1), 1, 1, 2, 2, n_species_total=3),
    )


def run(kernel: str, model, cfg: SimConfig):
    start = time.perf_counter()
    report = simulate(model, cfg, kernel=kernel)
    elapsed = time.perf_counter() - start
    return report, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--events", type=int, default=2_000_000)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    model = benchmark_model()
    cfg = SimConfig(seed=args.seed, total_events=args.events,
                    burn_in_events=args.events // 20)

    if _select_kernel("compiled")[1] != "compiled":
        print("compiled kernel unavailable; benchmarking the fallback only")
        report, dt = run("python", model, cfg)
        print(f"python   : {args.events / dt / 1e6:7.2f} M events/s ({dt:.2f}s)")
        return

    results = {}
    for kernel in ("compiled", "python"):
        report, dt = run(kernel, model, cfg)
        results[kernel] = (report, dt)
        print(f"{kernel:9s}: {args.events / dt / 1e6:7.2f} M events/s ({dt:.2f}s)")

    compiled_dict = results["compiled"][0].to_json_dict()
    python_dict = results["python"][0].to_json_dict()
    identical = json.dumps(compiled_dict, sort_keys=True) == json.dumps(
        python_dict, sort_keys=True
    )
    speedup = results["python"][1] / results["compiled"][1]
    print(f"speedup  : {speedup:7.1f}x")
    print(f"identical: {identical}")
    if not identical:
        raise SystemExit("kernel outputs diverged; the twins are out of lockstep")


if __name__ == "__main__":
    main()
