"""Compare the compiled and numpy sampling kernels.

Usage: python3 benchmarks/bench_kernels.py [-n DRAWS] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from gtrmodel.core import LocallyUniformDistribution
from gtrmodel.kernels import _fallback

try:
    from gtrmodel.kernels import _ckernels
except ImportError:
    _ckernels = None


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("-n", type=int, default=1_000_000, help="draws per call")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    rng = np.random.Generator(np.random.Philox(0))
    u1, u2 = rng.random(args.n), rng.random(args.n)
    d1 = LocallyUniformDistribution(0.5, 0.0772).to_piecewise()
    d2 = LocallyUniformDistribution(0.5884, -0.1742).to_piecewise()
    call = (u1, u2, d1.breakpoints, d1.cdf, d1.densities, 0.1118,
            d2.breakpoints, d2.cdf, d2.densities, 0.3158, -0.3158)

    backends = [("numpy", _fallback)]
    if _ckernels is None:
        print("compiled kernels not built; run `python3 setup.py build_ext --inplace`")
    else:
        backends.append(("cython", _ckernels))

    results = {}
    print(f"{'kernel':<18}{'backend':<10}{'best (ms)':>12}{'Mdraws/s':>12}")
    for kernel, run in (
        ("inverse_cdf", lambda m: m.inverse_cdf(u1, d1.breakpoints, d1.cdf, d1.densities)),
        ("count_sequential", lambda m: m.count_sequential(*call)),
    ):
        for name, mod in backends:
            best = min(timeit.repeat(lambda: run(mod), number=1, repeat=args.repeat))
            results[kernel, name] = run(mod)
            print(f"{kernel:<18}{name:<10}{best * 1e3:>12.2f}{args.n / best / 1e6:>12.1f}")
        if len(backends) == 2:
            same = np.array_equal(results[kernel, "numpy"], results[kernel, "cython"])
            print(f"{'':<18}outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
