"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --n 10,14,18,20 --repeat 5
"""
import argparse
import timeit

import numpy as np

from qdcluster import _fallback

try:
    from qdcluster import _kernels
except ImportError:
    _kernels = None


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--n", default="10,12,14,16,18,20")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print("n,kernel,numpy_s,cython_s,speedup")
    for n in (int(v) for v in args.n.split(",")):
        m = np.triu(rng.normal(size=(n, n)), 1)
        theta = m + m.T
        amps = np.full(1 << n, 2 ** (-n / 2), dtype=complex)
        cases = {
            "diagonal_phases": lambda mod: mod.diagonal_phases(theta),
            "apply_diagonal": lambda mod: mod.apply_diagonal(amps.copy(), theta),
        }
        for name, call in cases.items():
            t_np = bench(lambda: call(_fallback), args.repeat)
            if _kernels is None:
                print(f"{n},{name},{t_np:.4g},,")
                continue
            t_cy = bench(lambda: call(_kernels), args.repeat)
            assert np.allclose(call(_fallback), call(_kernels), atol=1e-9)
            print(f"{n},{name},{t_np:.4g},{t_cy:.4g},{t_np / t_cy:.2f}")


if __name__ == "__main__":
    main()
