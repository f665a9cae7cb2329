"""Compare the numba and numpy backends on circuit evaluation over Z/p.

    python benchmarks/bench_kernels.py --dims 2 4 8 16 --repeat 5
"""

import argparse
import random
import time

import numpy as np

from ncpit import kernels
from ncpit.algebra import PrimeField
from ncpit.circuit import gen_random_instance, power_sum_circuit

M61 = (1 << 61) - 1


def random_mats(n, dim, p, rng):
    return [np.array([[rng.randrange(p) for _ in range(dim)] for _ in range(dim)], dtype=object)
            for _ in range(n)]


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")

    rng = random.Random(args.seed)
    cases = [
        ("power 2^40 (83 gates)", power_sum_circuit(40)),
        ("random n=4 d=20 t=32", gen_random_instance(4, 20, 32, args.seed, PrimeField(M61))[0]),
    ]
    print(f"{'circuit':<24} {'dim':>4} {'numpy_s':>10} {'numba_s':>10} {'speedup':>8}")
    for name, c in cases:
        for dim in args.dims:
            mats = random_mats(c.nvars, dim, M61, rng)
            run = {b: (lambda b=b: kernels.eval_tape(c.tape, mats, M61, backend=b)) for b in ("numpy", "numba")}
            assert (run["numpy"]() == run["numba"]()).all()  # also compiles / loads the cache
            t_np = best_time(run["numpy"], args.repeat)
            t_nb = best_time(run["numba"], args.repeat)
            print(f"{name:<24} {dim:>4} {t_np:>10.5f} {t_nb:>10.5f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
