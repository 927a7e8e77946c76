"""Compare the numba and numpy kernels on region probabilities and price choice.

    python3 benchmarks/bench_kernels.py [--rows N] [--K K] [--repeat R]
"""

import argparse
import time

import numpy as np

from privseg import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=1 << 20)
    ap.add_argument("--K", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--beta", type=float, default=0.3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    draws = rng.standard_exponential((args.rows, args.K))
    values = np.cumsum(rng.uniform(0.5, 1.5, args.K))
    u = rng.random(args.rows)
    if not _kernels._HAVE_NUMBA:
        print("numba not installed; only the numpy path is timed")

    cases = {
        "region_moments": (
            lambda: _kernels._region_moments_nb(draws, values, args.beta),
            lambda: _kernels.region_moments_numpy(draws, values, args.beta),
        ),
        "choose_prices": (
            lambda: _kernels._choose_prices_nb(draws, values, args.beta, _kernels.TIE_UNIFORM, u),
            lambda: _kernels.choose_prices_numpy(draws, values, args.beta, _kernels.TIE_UNIFORM, u),
        ),
    }
    print(f"rows={args.rows} K={args.K} beta={args.beta}")
    print(f"{'kernel':<16}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  agree")
    for name, (nb, npf) in cases.items():
        a, b = nb(), npf()  # warm-up, also compiles
        same = all(np.allclose(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else bool(np.array_equal(a, b))
        t_nb = best_of(nb, args.repeat) if _kernels._HAVE_NUMBA else float("nan")
        t_np = best_of(npf, args.repeat)
        print(f"{name:<16}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>9.1f}  {same}")


if __name__ == "__main__":
    main()
