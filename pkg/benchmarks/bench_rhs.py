"""Time the compiled and numpy RHS kernels on Example 1 data.

    python benchmarks/bench_rhs.py [--cases 80:2,160:3,1280:5] [--repeat 5]

Prints per-call timings, the speedup and the largest relative difference
between the two backends.
"""
import argparse
import timeit

import numpy as np

from bondi_hdg import kernels
from bondi_hdg.field import project
from bondi_hdg.mesh import build_uniform
from bondi_hdg.operator import rhs_numpy
from bondi_hdg.scenarios import example1
from bondi_hdg.tables import Discretization


def parse_cases(text):
    out = []
    for item in text.split(","):
        N, k = item.split(":")
        out.append((int(N), int(k)))
    return out


def best_time(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cases", default="1:3,20:2,80:2,160:3,640:3,1280:5",
                        help="comma-separated N:k pairs")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    sc = example1()
    ub = sc.U_b(0.0)
    print(f"compiled backend available: {kernels.HAVE_COMPILED}")
    print(f"{'N':>6} {'k':>3} {'numpy [us]':>12} {'compiled [us]':>14} {'speedup':>8} {'max rel diff':>13}")
    for N, k in parse_cases(args.cases):
        disc = Discretization(build_uniform(sc.b, N), k)
        C = project(sc.u0, disc.mesh, k).coeffs
        t_np = best_time(lambda: rhs_numpy(C, disc, ub, 0.0), args.repeat)
        if kernels.HAVE_COMPILED:
            t_c = best_time(lambda: kernels.rhs_compiled(C, disc, ub, 0.0), args.repeat)
            a = rhs_numpy(C, disc, ub, 0.0)[0]
            b = kernels.rhs_compiled(C, disc, ub, 0.0)[0]
            diff = np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300)
            print(f"{N:6d} {k:3d} {t_np * 1e6:12.1f} {t_c * 1e6:14.1f} {t_np / t_c:8.2f} {diff:13.2e}")
        else:
            print(f"{N:6d} {k:3d} {t_np * 1e6:12.1f} {'n/a':>14} {'n/a':>8} {'n/a':>13}")


if __name__ == "__main__":
    main()
