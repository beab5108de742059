"""Time the numba kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. The first numba
call includes compilation and is reported separately.
"""
import argparse
import time

import numpy as np

from hesselink import _kernels as K


def timed(fn, *args, repeat=3):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def problems(rng):
    lams = rng.integers(-3, 4, size=(200_000, 5)).astype(np.int64)
    heads = np.array([1, 2, 3, 4], dtype=np.int64)
    tails = np.array([0, 0, 1, 2], dtype=np.int64)
    theta = np.array([-3, 1, 1, 0, 1], dtype=np.int64)
    alpha = np.array([1, 1, 2, 1, 1], dtype=np.int64)
    samples = rng.integers(-20, 21, size=(200_000, 4)).astype(np.int64)
    normals4 = rng.integers(-4, 5, size=(3, 4)).astype(np.int64)
    normals5 = np.array([[1, -1, 0, 0, 2], [0, 1, 1, -1, 0], [-1, 0, 3, 0, 1]], dtype=np.int64)
    return {
        "competitor_scan": ((lams, heads, tails, theta, alpha, -2, 5, True),
                            K.competitor_scan_numpy, K.competitor_scan_numba),
        "cone_scan": ((samples, normals4, np.array([1, -2, 0, 3]), np.array([1, 2, 1, 1]), -1, 7),
                      K.cone_scan_numpy, K.cone_scan_numba),
        "box_cone_points": ((normals5, 5, 4), K.box_cone_points_numpy, K.box_cone_points_numba),
    }


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a[:2] == b[:2]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"backend: {K.backend()}")
    for name, (inputs, np_fn, nb_fn) in problems(np.random.default_rng(args.seed)).items():
        t_np, r_np = timed(np_fn, *inputs, repeat=args.repeat)
        line = f"{name:16s} numpy {t_np:8.4f}s"
        if nb_fn is not None:
            t_first, _ = timed(nb_fn, *inputs, repeat=1)
            t_nb, r_nb = timed(nb_fn, *inputs, repeat=args.repeat)
            line += f"  numba {t_nb:8.4f}s (first call {t_first:.2f}s)  speedup {t_np / t_nb:6.1f}x"
            line += "" if same(r_np, r_nb) else "  RESULTS DIFFER"
        print(line)


if __name__ == "__main__":
    main()
