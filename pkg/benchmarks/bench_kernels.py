"""Time the compiled RK4 flow kernel against the numpy fallback.

    python benchmarks/bench_kernels.py [--dim 8] [--steps 6000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from diracflow import kernels
from diracflow.matrixlab import build_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--steps", type=int, default=6000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    model = build_model(args.dim, 1, 0.2)
    h0 = np.array(model.h, complex)
    b = model.beta_diag
    step = 1e-3
    runners = {"python": kernels.rk4_steps_python}
    if kernels.rk4_steps_compiled is not None:
        runners["cython"] = kernels.rk4_steps_compiled
    else:
        print("compiled kernel not built; timing the fallback only")

    best = {}
    for name, fn in runners.items():
        t = timeit.repeat(lambda: fn(h0, b, step, args.steps), number=1, repeat=args.repeat)
        best[name] = min(t)
        print(f"{name:8s} {best[name] * 1e3:9.2f} ms  ({args.steps} RK4 steps, dim {args.dim})")
    if len(best) == 2:
        diff = np.linalg.norm(runners["python"](h0, b, step, args.steps) - runners["cython"](h0, b, step, args.steps))
        print(f"speedup  {best['python'] / best['cython']:9.2f}x  (|difference| {diff:.1e})")


if __name__ == "__main__":
    main()
