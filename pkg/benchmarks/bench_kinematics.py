"""Benchmark the compiled kinematics kernel against the pure-Python twin.

Runs the same workload (many short pose integrations, mimicking the 50 ms
sample cadence) through both backends and reports per-step cost. The two
must also agree bit for bit; the benchmark asserts that while it is at it.

    python benchmarks/bench_kinematics.py [--segments 20000] [--dt-us 50000]
"""

from __future__ import annotations

import argparse
import math
import time


def load_backends():
    from lptvehicle import _kinematics_py

    backends = [("python", _kinematics_py)]
    try:
        from lptvehicle import _kinematics_cy

        backends.insert(0, ("cython", _kinematics_cy))
    except ImportError:
        pass
    return backends


def run(kernel, segments: int, dt_us: int):
    x = y = 0.0
    h = 0.0
    v = 14.0
    omega = v / 20.0 * math.tan(math.radians(45.0))
    start = time.perf_counter()
    for _ in range(segments):
        x, y, h = kernel.advance(x, y, h, v, omega, dt_us, 1000)
    elapsed = time.perf_counter() - start
    return elapsed, (x, y, h)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--segments", type=int, default=20_000,
                        help="number of integration calls (default 20000)")
    parser.add_argument("--dt-us", type=int, default=50_000,
                        help="virtual microseconds per call (default 50000)")
    args = parser.parse_args()

    steps_total = args.segments * (args.dt_us // 1000)
    backends = load_backends()
    results = {}
    for name, kernel in backends:
        elapsed, final = run(kernel, args.segments, args.dt_us)
        results[name] = (elapsed, final)
        print(f"{name:>7}: {elapsed:8.3f} s total, "
              f"{elapsed / steps_total * 1e9:8.1f} ns/step, "
              f"final x={final[0]:.6f} y={final[1]:.6f}")

    if len(results) == 2:
        py_elapsed, py_final = results["python"]
        cy_elapsed, cy_final = results["cython"]
        if cy_final != py_final:
            print("MISMATCH: backends disagree bit for bit", flush=True)
            return 1
        print(f"speedup: {py_elapsed / cy_elapsed:.1f}x "
              f"(backends agree bit for bit)")
    else:
        print("compiled backend not built; nothing to compare")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
