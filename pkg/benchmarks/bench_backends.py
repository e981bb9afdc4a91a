#!/usr/bin/env python3
"""Benchmark the compiled core against the pure-Python fallback.

Times the three hot kernels on the scaling-group generator: plain
evaluation, a gradient pass, and an RK4 flow (1000 steps), plus a tangent
flow (variational jacobian).  Run as::

    python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

from cantrans import PhasePoint, ScalarField, backend


def time_call(fn, repeat, inner=1):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def bench(handle, prog, slots, repeat):
    rows = {}
    rows["eval"] = time_call(lambda: handle.eval_value(prog, slots),
                             repeat, inner=200)
    rows["gradient (k=3)"] = time_call(
        lambda: handle.eval_grad(prog, slots, 3), repeat, inner=200)
    rows["hessian (k=3)"] = time_call(
        lambda: handle.eval_hess(prog, slots, 3), repeat, inner=50)
    rows["rk4 flow, 1000 steps"] = time_call(
        lambda: handle.rk4_flow(prog, 1, slots, 1.0, 1000), repeat)
    rows["rk4 tangent flow, 1000 steps"] = time_call(
        lambda: handle.rk4_flow_tangent(prog, 1, slots, 1.0, 1000), repeat)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    f = ScalarField.from_source("q1*p1 - t*p1^2/m", 1, {"m": 1.0})
    slots = f.slots(PhasePoint((1.5,), (-0.7,), 2.0))
    prog = f.program

    handles = [backend.handle("pure")]
    if backend.has_compiled():
        handles.append(backend.handle("compiled"))
    else:
        print("compiled core not built; benchmarking the pure backend only")

    results = {h.name: bench(h, prog, slots, args.repeat) for h in handles}

    names = list(results["pure"])
    width = max(len(n) for n in names)
    header = f"{'kernel':<{width}}  " + "  ".join(
        f"{h.name:>12}" for h in handles)
    if len(handles) == 2:
        header += f"  {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name in names:
        row = f"{name:<{width}}  "
        row += "  ".join(f"{results[h.name][name] * 1e6:>10.1f}us"
                         for h in handles)
        if len(handles) == 2:
            ratio = results["pure"][name] / results["compiled"][name]
            row += f"  {ratio:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
