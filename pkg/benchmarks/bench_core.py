"""Time the compiled kernel core against the pure-Python fallback.

Run with ``python3 benchmarks/bench_core.py``.  Each case is timed with
``timeit`` (best of ``--repeat``) on both backends and the largest difference
of the outputs relative to their maximum is reported next to the speedup.
"""

import argparse
import timeit

import numpy as np

from dunkl_hardy._backend import available_backends, load_backend
from dunkl_hardy.kernels import default_rule


def cases(size, seed):
    rng = np.random.default_rng(seed)
    x = np.linspace(-10, 10, size)
    z = rng.uniform(0, 50, size * size // 4)
    s = rng.choice([-1.0, 1.0], z.size)
    X = rng.normal(size=(size * 4, 2))
    Y = rng.normal(size=(size * 4, 2))
    rule = default_rule()
    k2 = np.array([0.5, 1.0])
    return {
        "reduced_bessel": lambda m: m.reduced_bessel(0.7, z),
        "kernel_bracket": lambda m: m.kernel_bracket(1.0, z, s),
        "heat_matrix": lambda m: m.heat_matrix(1.0, 0.5, x, x),
        "dunkl_matrix": lambda m: m.dunkl_matrix(1.5, x, 0.2 * x),
        "poisson_pairs": lambda m: m.poisson_pairs(k2, 0.7, X, Y, rule.v, rule.w),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--size", type=int, default=400, help="grid nodes per axis")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    found = available_backends()
    if "compiled" not in found:
        print("compiled backend not built; only the Python fallback is available")
    mods = {name: load_backend(name) for name in found}
    print(f"{'case':16s}" + "".join(f"{name:>12s}" for name in mods) + f"{'speedup':>10s}{'rel diff':>12s}")
    for name, fn in cases(args.size, args.seed).items():
        times = {b: min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for b, m in mods.items()}
        row = f"{name:16s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in mods)
        if len(mods) == 2:
            a, b = np.asarray(fn(mods["compiled"])), np.asarray(fn(mods["python"]))
            diff = float(np.max(np.abs(a - b)) / np.max(np.abs(b)))
            row += f"{times['python'] / times['compiled']:9.1f}x{diff:12.2e}"
        print(row)


if __name__ == "__main__":
    main()
