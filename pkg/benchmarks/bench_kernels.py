"""Compiled vs pure-Python kernels on the workloads the package actually runs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is timed on identical inputs through both implementations and
the outputs are compared before any timing is reported.
"""
import argparse
import random
import sys
import timeit

import numpy as np

from linecomplex import msystem as ms
from linecomplex.field import RATIONAL, get_field
from linecomplex.kernels import compiled_kernels, python_kernels
from linecomplex.lattice import Box


def _fill_inputs(field, box, seed=0):
    shape = ms.MSystemShape.square(3, 5)
    sites, stride, cauchy, plan, _ = ms._fill_plan(shape, box, shape.L)
    rng = random.Random(seed)
    while True:
        data = ms.random_cauchy(shape, box, field, rng)
        if field.exact:
            vals = [None] * (stride * len(sites))
        else:
            vals = np.zeros(stride * len(sites), dtype=np.complex128)
        for dst, i, k, n in cauchy:
            vals[dst] = field(data[(i, k, n)])
        probe = list(vals) if field.exact else vals.copy()
        run = python_kernels.run_plan if field.exact else (lambda v, p: python_kernels.run_plan_complex(v, p, 1e-12))
        if run(probe, plan) < 0:
            return vals, plan


def _cases():
    rng = random.Random(1)
    box = Box.cube(0, 3)
    f64 = get_field("f64")
    vals_q, plan = _fill_inputs(RATIONAL, box)
    vals_c, _ = _fill_inputs(f64, box)
    mats = [[[RATIONAL.random(rng) for _ in range(6)] for _ in range(6)] for _ in range(50)]
    cmats = [[[f64.random(rng) for _ in range(6)] for _ in range(6)] for _ in range(50)]
    wide = [[[RATIONAL.random(rng) for _ in range(10)] for _ in range(9)] for _ in range(20)]
    return {
        "run_plan (rational, 0..3 box)": (
            lambda k: (lambda v=list(vals_q): (k.run_plan(v, plan), v)[1])),
        "run_plan_complex (f64, 0..3 box)": (
            lambda k: (lambda v=vals_c.copy(): (k.run_plan_complex(v, plan, 1e-12), v)[1])),
        "det_bareiss (50 rational 6x6)": (lambda k: (lambda: [k.det_bareiss(m) for m in mats])),
        "det_complex (50 complex 6x6)": (lambda k: (lambda: [k.det_complex(m) for m in cmats])),
        "rref (20 rational 9x10)": (lambda k: (lambda: [k.rref(m, 10) for m in wide])),
    }


def _same(a, b):
    # float chains differ in the last bits between C and Python evaluation order
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a, b = np.asarray(a), np.asarray(b)
        return np.max(np.abs(a - b)) <= 1e-9 * max(np.max(np.abs(a)), 1.0)
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, complex) or isinstance(b, complex):
        return abs(a - b) <= 1e-9 * max(abs(a), abs(b), 1.0)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled_kernels is None:
        print("compiled extension not built; run: python3 setup.py build_ext --inplace")
        return 1
    print(f"{'kernel':36s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, make in _cases().items():
        # fresh inputs per call for the in-place kernels
        if not _same(make(python_kernels)(), make(compiled_kernels)()):
            print(f"{name}: outputs differ")
            return 2
        tp = min(timeit.repeat(lambda: make(python_kernels)(), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: make(compiled_kernels)(), number=1, repeat=args.repeat))
        print(f"{name:36s} {tp * 1e3:12.2f} {tc * 1e3:12.2f} {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
