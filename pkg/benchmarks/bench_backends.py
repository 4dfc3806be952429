"""Benchmark: compiled kernel vs pure-Python twin on the bundled cycle.

Usage: python benchmarks/bench_backends.py [--repeats N]

Times a single-design simulation and a full 51-point capacity sweep for
the NCA-NMC pair on one pass of the bundled 1800 s cycle, per backend.
"""

import argparse
import time

import numpy as np

from hessopt import _core_py
from hessopt._system import build_kernel_system
from hessopt.config import load_config
from hessopt.drivetrain import power_trace
from hessopt.pack import build_hess

try:
    from hessopt import _fastcore
except ImportError:
    _fastcore = None


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    cfg = load_config()
    cyc = cfg.cycle  # one 1800 s pass
    backends = [("python", _core_py)]
    if _fastcore is not None:
        backends.append(("compiled", _fastcore))
    else:
        print("compiled kernel not built; benchmarking the python twin only")

    design = build_hess(0.4, 60_000.0, 400.0, cfg.cell("nmc"), cfg.cell("nca"),
                        0.98, cfg.vehicle.p_em_max)
    tr = power_trace(cyc, cfg.vehicle, cfg.vehicle.m_base + design.mass)
    sysk = build_kernel_system(design, dt=cyc.dt)

    print(f"single design, {cyc.speed.size} steps:")
    singles = {}
    for name, mod in backends:
        singles[name] = time_call(lambda m=mod: m.simulate_arrays(sysk, tr.p_em, tr.p_shaft),
                                  args.repeats)
        print(f"  {name:9s} {singles[name] * 1e3:8.1f} ms")

    grid = [i / 50 for i in range(51)]
    print("51-point NCA-NMC sweep:")
    sweeps = {}
    for name, mod in backends:
        def run(m=mod):
            for g in grid:
                d = build_hess(g, 60_000.0, 400.0, cfg.cell("nmc"), cfg.cell("nca"),
                               0.98, cfg.vehicle.p_em_max)
                if not d.feasible:
                    continue
                t = power_trace(cyc, cfg.vehicle, cfg.vehicle.m_base + d.mass)
                m.simulate_arrays(build_kernel_system(d, dt=cyc.dt), t.p_em, t.p_shaft)

        sweeps[name] = time_call(run, max(1, args.repeats - 1))
        print(f"  {name:9s} {sweeps[name]:8.2f} s")

    if len(backends) == 2:
        print(f"speedup: single {singles['python'] / singles['compiled']:.1f}x, "
              f"sweep {sweeps['python'] / sweeps['compiled']:.1f}x")
        a = _core_py.simulate_arrays(sysk, tr.p_em, tr.p_shaft)
        b = _fastcore.simulate_arrays(sysk, tr.p_em, tr.p_shaft)
        worst = max(np.max(np.abs(a["trace"][k] - b["trace"][k])) for k in a["trace"])
        print(f"agreement: worst trace difference {worst:.3e}")


if __name__ == "__main__":
    main()
