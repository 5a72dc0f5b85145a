"""Benchmark the compiled kernel against the pure-Python fallback.

Runs the shipped octagon scenario on every available backend, reports wall
time and steps per second, and checks that the logs agree.

Usage: python benchmarks/bench_engines.py [--t-end SECONDS] [--repeats N]
"""
import argparse
import time

import numpy as np

from bicopter_safe import _engine, run_scenario
from bicopter_safe.config import default_octagon_config, scenario_from_config


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-end", type=float, default=None,
                        help="override scenario duration [s]")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    doc = default_octagon_config()
    if args.t_end is not None:
        doc["t_end"] = args.t_end
    sc = scenario_from_config(doc)
    print(f"scenario: octagon, dt={sc.dt:g} s, t_end={sc.t_end:g} s, "
          f"{sc.n_rows} rows")

    logs = {}
    for name in _engine.available():
        best = float("inf")
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            log = run_scenario(sc, engine=name)
            best = min(best, time.perf_counter() - t0)
        logs[name] = log.to_array()
        print(f"  {name:9s} {best:8.3f} s   {sc.n_rows / best / 1e3:9.1f} ksteps/s")

    if len(logs) == 2:
        dev = float(np.max(np.abs(logs["compiled"] - logs["python"])))
        print(f"  max |compiled - python| over all log entries: {dev:.3e}")
    else:
        print("  compiled kernel not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
