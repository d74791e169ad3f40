#!/usr/bin/env python3
"""Time the numba-compiled hot kernels against their pure-numpy/python
fallbacks.

The package selects the backend at import time: set OSCAVG_FORCE_NUMPY=1 to
run everything on the fallback path.  This script times both implementations
directly (jitted dispatcher vs. the uncompiled function) so a single run
shows the speedup.

    python3 benchmarks/compare_backends.py [--basin-points N] [--fpu-steps N]
"""

import argparse
import time

import numpy as np

from oscavg.accel import HAVE_NUMBA, NUMBA_ENABLED, thread_count


def _time(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_basin(n_points):
    from oscavg.cput import REFERENCE, SINK, _basin_kernel, _basin_numpy

    p = REFERENCE
    rng = np.random.default_rng(0)
    states = np.column_stack([rng.uniform(5, 30, n_points),
                              rng.uniform(0, 2 * np.pi, n_points),
                              rng.uniform(0.2, 2, n_points),
                              rng.uniform(0, 2 * np.pi, n_points)])
    args = (p.epsilon, p.D, p.omega, p.F, p.alpha, p.beta, p.gamma,
            0.05, 1000, SINK, np.pi / p.omega)

    t_np, (r_np, d_np) = _time(_basin_numpy, states.copy(), *args, repeats=2)
    row = [("basin scan (numpy batch)", t_np)]
    if HAVE_NUMBA:
        _basin_kernel(np.ascontiguousarray(states[:2]), *args)  # compile
        t_nb, (r_nb, d_nb) = _time(_basin_kernel,
                                   np.ascontiguousarray(states), *args)
        row.append(("basin scan (numba)", t_nb))
        assert np.allclose(r_nb, r_np, rtol=1e-10, atol=1e-12)
    return row


def bench_fpu(n_steps):
    from oscavg.fpu import REFERENCE_P0, FpuParams, _fpu_verlet_kernel

    p = FpuParams()
    q0 = np.zeros(6)
    c = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
    args = (q0, REFERENCE_P0.copy(), p.m, p.omega, 0.01 / p.omega,
            n_steps, max(1, n_steps // 10), c)

    kernel = _fpu_verlet_kernel
    py = getattr(kernel, "py_func", kernel)
    t_py, _ = _time(py, *args, repeats=2)
    row = [("lattice verlet (python)", t_py)]
    if HAVE_NUMBA:
        kernel(q0, REFERENCE_P0.copy(), p.m, p.omega, 0.01 / p.omega,
               10, 10, c)  # compile
        t_nb, _ = _time(kernel, *args)
        row.append(("lattice verlet (numba)", t_nb))
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--basin-points", type=int, default=2000)
    ap.add_argument("--fpu-steps", type=int, default=200_000)
    args = ap.parse_args()

    print(f"numba available: {HAVE_NUMBA}; enabled: {NUMBA_ENABLED}; "
          f"threads: {thread_count()}")
    rows = bench_basin(args.basin_points) + bench_fpu(args.fpu_steps)
    width = max(len(name) for name, _ in rows)
    base = {}
    for name, t in rows:
        kind = name.split(" (")[0]
        speed = ""
        if kind in base:
            speed = f"  ({base[kind] / t:5.1f}x)"
        else:
            base[kind] = t
        print(f"{name:<{width}}  {t * 1e3:10.2f} ms{speed}")


if __name__ == "__main__":
    main()
