"""Time the numba and numpy kernel paths on search-sized workloads.

Usage: python benchmarks/bench_kernels.py [--terms K] [--dx DX] [--dy DY] [--reps N]
"""

import argparse
import time

import numpy as np

from condsep import kernels


def make_inputs(k, dx, dy, seed=0):
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((k, dx)) + 1j * rng.standard_normal((k, dx))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    ys = rng.standard_normal((k, dy)) + 1j * rng.standard_normal((k, dy))
    ys /= np.linalg.norm(ys, axis=1, keepdims=True)
    w = rng.dirichlet(np.ones(k))
    g = rng.standard_normal((dx * dy, dx * dy)) + 1j * rng.standard_normal((dx * dy, dx * dy))
    herm = (g + g.conj().T) / 2
    probs = rng.random((dx, dy, k))
    probs /= probs.sum()
    return w, xs, ys, herm, probs


def bench(fn, args, reps):
    fn(*args)  # warm up (numba compiles here)
    start = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - start) / reps


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--terms", type=int, default=16)
    parser.add_argument("--dx", type=int, default=2)
    parser.add_argument("--dy", type=int, default=3)
    parser.add_argument("--reps", type=int, default=2000)
    args = parser.parse_args()

    w, xs, ys, herm, probs = make_inputs(args.terms, args.dx, args.dy)
    cases = {
        "assemble_mixture": (w, xs, ys),
        "product_gram": (xs, ys),
        "product_overlaps": (herm, xs, ys),
        "env_x": (herm, ys[0], args.dx, args.dy),
        "env_y": (herm, xs[0], args.dx, args.dy),
        "classical_cmi_bits": (probs, 1e-12),
        "partial_transpose_y": (herm, args.dx, args.dy),
    }

    backends = ["numpy"]
    if kernels.NUMBA_ENABLED:
        backends.append("numba")
    else:
        print("numba backend unavailable (CONDSEP_NUMBA=0 or numba missing); timing numpy only")

    print(f"K={args.terms} dx={args.dx} dy={args.dy}, {args.reps} reps, mean per call")
    header = f"{'kernel':24s}" + "".join(f"{b:>14s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for name, call_args in cases.items():
        times = [bench(kernels.get_backend(b)[name], call_args, args.reps) for b in backends]
        row = f"{name:24s}" + "".join(f"{t * 1e6:12.2f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
