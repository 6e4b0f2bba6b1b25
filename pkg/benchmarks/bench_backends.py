"""Time the compiled kernel against the numpy fallback on the same workload.

    python3 benchmarks/bench_backends.py [--paths N] [--repeat R] [--threads T]

Reports nanoseconds per path-step for one barrier and for six barriers
scored on shared paths, plus the largest relative difference between the
two backends' damages.
"""

import argparse
import math
import time

import numpy as np

from bitebullet import CostSchedule, DamageDynamics, SimConfig, _core
from bitebullet.montecarlo import simulate_barriers

WORKLOADS = {
    "1 barrier": [10.1915],
    "6 barriers": [math.inf, 1.0, 2.0, 5.0, 10.1915, 15.0],
}


def best_of(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    dyn, cost = DamageDynamics(), CostSchedule(60.0, 0.0)
    cfg = SimConfig(paths=args.paths)
    steps = args.paths * cfg.n_steps
    backends = sorted(_core.BACKENDS)
    print(f"{args.paths} paths x {cfg.n_steps} steps, {args.threads} thread(s); backends: {backends}")
    print(f"{'workload':<12}{'backend':<10}{'seconds':>10}{'ns/path-step':>15}{'speedup':>10}")
    for name, levels in WORKLOADS.items():
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = best_of(
                lambda: simulate_barriers(dyn, cost, levels, cfg, threads=args.threads, backend=b),
                args.repeat)
        for b in backends:
            speed = times["python"] / times[b]
            print(f"{name:<12}{b:<10}{times[b]:>10.3f}{1e9 * times[b] / steps:>15.1f}{speed:>9.1f}x")
        if len(backends) == 2:
            a, c = outs["python"][0], outs["cython"][0]
            rel = np.max(np.abs(a - c) / np.abs(c))
            print(f"{'':<12}max relative damage difference {rel:.1e}")


if __name__ == "__main__":
    main()
