"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Numba times exclude the first (compiling) call. Each row also checks that
both backends return the same numbers.
"""

import argparse
import time

import numpy as np

from lpchar import kernels


def best_of(fn, args, repeat):
    fn(*args)  # warm-up / compile
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(scale):
    rng = np.random.default_rng(0)
    rows, atoms = int(200_000 * scale), 4
    F = rng.uniform(0.05, 5, (rows, atoms))
    G = rng.uniform(0.05, 5, (rows, atoms))
    W = rng.dirichlet(np.ones(atoms), rows)
    quads = rng.uniform(0, 4, (rows, 4))
    m = int(1500 * np.sqrt(scale))
    M = rng.uniform(0, 3, (m, m))
    wx, wy = rng.dirichlet(np.ones(m)), rng.uniform(0.1, 1, m)
    k = int(1600 * np.sqrt(scale))
    fp = rng.normal(size=k)
    fm = rng.normal(size=(k, k))
    return [
        ("holder_sides_batch", (F, G, W, 3.0, 1.5), f"{rows}x{atoms}"),
        ("reversed_holder_sides_batch", (F, G, W, 0.5, -1.0), f"{rows}x{atoms}"),
        ("mulholland_sides_batch", (quads, 3.0), f"{rows} quads"),
        ("gmi_sides", (M, wx, wy, 2.5), f"{m}x{m}"),
        ("midpoint_concavity", (fp, fm), f"{k} points"),
    ]


def small_loop(fn, calls):
    """Many calls on a 4-atom case, the pattern used inside the search."""
    def run(f, g, w, p, q):
        for _ in range(calls):
            out = fn(f, g, w, p, q)
        return out
    return run


def same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.allclose(x, y, rtol=1e-12, atol=1e-12) for x, y in zip(a, b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply problem sizes")
    args = ap.parse_args()

    impls = kernels.implementations()
    if "numba" not in impls:
        print("numba not importable; only the numpy backend is available")
    print(f"{'kernel':30s} {'size':>14s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}  agree")
    for name, fargs, size in cases(args.scale):
        t_np, out_np = best_of(impls["numpy"][name], fargs, args.repeat)
        if "numba" in impls:
            t_nb, out_nb = best_of(impls["numba"][name], fargs, args.repeat)
            print(f"{name:30s} {size:>14s} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:8.1f}  "
                  f"{same(out_np, out_nb)}")
        else:
            print(f"{name:30s} {size:>14s} {t_np * 1e3:10.2f} {'-':>10s} {'-':>8s}  -")

    rng = np.random.default_rng(1)
    f, g, w = rng.uniform(0.1, 5, 4), rng.uniform(0.1, 5, 4), rng.dirichlet(np.ones(4))
    calls = 20_000
    for name, p, q in (("holder_sides", 3.0, 1.5), ("reversed_holder_sides", 0.5, -1.0)):
        small = (f, g, w, p, q)
        t_np, out_np = best_of(small_loop(impls["numpy"][name], calls), small, args.repeat)
        label = f"{name} (loop)"
        if "numba" in impls:
            t_nb, out_nb = best_of(small_loop(impls["numba"][name], calls), small, args.repeat)
            print(f"{label:30s} {f'{calls} x 4':>14s} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:8.1f}  "
                  f"{same(out_np, out_nb)}")
        else:
            print(f"{label:30s} {f'{calls} x 4':>14s} {t_np * 1e3:10.2f} {'-':>10s} {'-':>8s}  -")


if __name__ == "__main__":
    main()
