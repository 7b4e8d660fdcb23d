"""Compare the numba kernels with the pure-numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Each kernel is timed on
both backends after a warm-up call (so numba compilation is excluded) and
the outputs are checked for agreement.
"""

import argparse
import time

import numpy as np

from splinepower.numeric import _kernels_numpy, kernels
from splinepower.numeric.bspline import BSplineBasis
from splinepower.numeric.estimate import residual_operator, top_singular_value
from splinepower.spaces import SplineSpaceSpec

try:
    from splinepower.numeric import _kernels_numba
except ImportError:
    _kernels_numba = None


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def with_backend(numba_on: bool, fn):
    saved = kernels._kernels_numba
    kernels._kernels_numba = _kernels_numba if numba_on else None
    try:
        return fn()
    finally:
        kernels._kernels_numba = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--n", type=int, default=8)
    args = ap.parse_args()
    if _kernels_numba is None:
        print("numba kernels unavailable; nothing to compare")
        return

    space = SplineSpaceSpec(args.p, args.p - 1, args.n)
    basis = BSplineBasis(space)
    x = np.linspace(0.0, 1.0, 20_000)
    R, _ = residual_operator(space, args.p, 8)
    M = R.T @ R
    v0 = np.ones(M.shape[0])

    cases = {
        "basis_matrix": lambda mod: mod.basis_matrix(basis.knots, space.p, x),
        "power_iteration": lambda mod: mod.power_iteration(M, v0, 1e-10, 10_000)[0],
    }
    print(f"space S^{space.p}_{{{space.k},{space.n}}}, repeat={args.repeat}")
    print(f"{'kernel':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, call in cases.items():
        a = np.asarray(call(_kernels_numba))
        b = np.asarray(call(_kernels_numpy))
        tn = best_of(lambda: call(_kernels_numba), args.repeat)
        tp = best_of(lambda: call(_kernels_numpy), args.repeat)
        diff = float(np.max(np.abs(a - b)))
        print(f"{name:<22}{tn:>12.4g}{tp:>12.4g}{tp / tn:>10.2f}{diff:>12.2e}")

    # source assembly is exercised through the full discretised operator
    run = lambda: top_singular_value(space, args.p, 8).value  # noqa: E731
    va = with_backend(True, run)
    vb = with_backend(False, run)
    tn = best_of(lambda: with_backend(True, run), args.repeat)
    tp = best_of(lambda: with_backend(False, run), args.repeat)
    print(f"{'operator (factor 8)':<22}{tn:>12.4g}{tp:>12.4g}{tp / tn:>10.2f}{abs(va - vb) / va:>12.2e}")


if __name__ == "__main__":
    main()
