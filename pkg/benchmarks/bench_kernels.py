"""Time the numba and pure-numpy variants of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both variants are called through the same dispatchers the simulator uses,
so the numbers reflect what ``AMROC_DISABLE_NUMBA=1`` costs.
"""
import argparse
import time

import numpy as np

from amroc import _kernels
from amroc.phy.codec import DEFAULT_CODEC, _signs, _taps


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    taps = _taps(DEFAULT_CODEC.generators, DEFAULT_CODEC.constraint_length)
    signs = _signs(DEFAULT_CODEC.generators, DEFAULT_CODEC.constraint_length)
    bits = rng.integers(0, 2, (250, 1046)).astype(np.uint8)
    llr = rng.standard_normal((250, 1046, 3))
    sinr = rng.exponential(10.0, (4000, 1200))
    betas = np.linspace(1.0, 10.0, 18)
    weights = rng.integers(8, 12, 1200).astype(np.float64)
    return {
        "conv_encode 250x1046": lambda nb: _kernels.conv_encode(bits, taps, use_numba=nb),
        "viterbi 250x1046": lambda nb: _kernels.viterbi_decode(llr, signs, use_numba=nb),
        "eesm 4000x1200x18": lambda nb: _kernels.eesm_reduce(sinr, betas, weights, use_numba=nb),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if not _kernels._HAVE_NUMBA:
        print("numba not installed; only the numpy path is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}")
    for name, fn in cases(rng).items():
        t_np = best_of(lambda: fn(False), args.repeat)
        if _kernels._HAVE_NUMBA:
            t_nb = best_of(lambda: fn(True), args.repeat)
            print(f"{name:<24}{t_np * 1e3:>12.1f}{t_nb * 1e3:>12.1f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<24}{t_np * 1e3:>12.1f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
