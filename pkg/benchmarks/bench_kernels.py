"""Time the compiled and pure-Python kernels on the same inputs.

Usage: python benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import math
import timeit

import numpy as np

from qwmarkov import _backend


def cases(steps):
    c, s = math.cos(math.pi / 4), math.sin(math.pi / 4)
    a0 = np.array([1.0 + 0j])
    b0 = np.array([0j])
    pl0 = np.array([1.0])
    pr0 = np.array([0.0])
    x = float(steps) * c
    nmax = int(x + 40 + 12 * x ** (1 / 3))
    nstart = nmax + 20 + int(math.sqrt(40 * nmax))
    nstart += nstart % 2
    return {
        f"unitary_run steps={steps}": lambda k: k.unitary_run(a0, b0, 0, c, s, steps, True),
        f"master_run steps={steps}": lambda k: k.master_run(pl0, pr0, 0, c * c, s * s, steps, True),
        f"bessel_downward x={x:.0f}": lambda k: k.bessel_downward(x, nmax, nstart),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    names = _backend.available()
    print(f"{'case':32s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(args.steps).items():
        times = []
        for name in names:
            k = _backend.get(name)
            fn(k)  # warm up
            times.append(min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)))
        row = f"{label:32s}" + "".join(f"{t:11.4f}s" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
