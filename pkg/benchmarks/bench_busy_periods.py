"""Time the busy-period simulation with the compiled and pure-Python kernels.

    python3 benchmarks/bench_busy_periods.py --slots 200000 --repeat 3
"""
import argparse
import time

import numpy as np

from mmrelay.blockage import simulate_periods
from mmrelay.kernels import busy_periods_ext
from mmrelay.scenario import ObstacleProcess


def best_of(backend, proc, slots, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = simulate_periods(proc, slots, seed=0, backend=backend)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--slots", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--nu", type=float, default=0.75)
    args = ap.parse_args()

    proc = ObstacleProcess(0.5, args.nu)
    t_py, s_py = best_of("python", proc, args.slots, args.repeat)
    print(f"python  {t_py:8.3f} s  ({args.slots / t_py:,.0f} slots/s)")
    if busy_periods_ext is None:
        print("cython  not built")
        return
    t_cy, s_cy = best_of("cython", proc, args.slots, args.repeat)
    same = np.array_equal(s_py.nonlos_s, s_cy.nonlos_s) and np.array_equal(s_py.los_s, s_cy.los_s)
    print(f"cython  {t_cy:8.3f} s  ({args.slots / t_cy:,.0f} slots/s)")
    print(f"speedup {t_py / t_cy:8.1f}x  outputs identical: {same}")


if __name__ == "__main__":
    main()
