"""Time each hot kernel on the numba and pure-numpy paths.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both kernel modules are imported directly, so one process covers both
paths. The first numba call (compilation or cache load) is excluded.
"""

import argparse
import timeit

import numpy as np

from factorizable import _kernels_numba as nb
from factorizable import _kernels_numpy as npk
from factorizable.games import chsh_functional


def cases(rng):
    kraus = rng.standard_normal((9, 6, 6)) + 1j * rng.standard_normal((9, 6, 6))
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    verts = npk.vertex_tables(2, 3)
    target = np.full(36, 1 / 9)
    a = np.ascontiguousarray(np.vstack([verts.T, np.ones((1, verts.shape[0]))]))
    b = np.append(target, 1.0)
    params = np.concatenate([rng.uniform(0, np.pi, 4), rng.standard_normal(8)])
    coeffs = np.ascontiguousarray(chsh_functional().coefficients)
    return {
        "kraus_apply (d=9, n=6)": lambda m: m.kraus_apply(kraus, x),
        "kraus_choi (d=9, n=6)": lambda m: m.kraus_choi(kraus),
        "vertex_tables (n=3, k=3)": lambda m: m.vertex_tables(3, 3),
        "nnls (37 x 81)": lambda m: m.nnls(a, b, 10_000),
        "qubit_bell_value": lambda m: m.qubit_bell_value(params, coeffs, False),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speedup':>8s}")
    for name, call in cases(rng).items():
        call(nb)  # compile / load cache
        timings = {}
        for label, mod in (("numpy", npk), ("numba", nb)):
            timer = timeit.Timer(lambda: call(mod))
            loops, _ = timer.autorange()
            best = min(timer.repeat(repeat=args.repeat, number=loops)) / loops
            timings[label] = best * 1e6
        speedup = timings["numpy"] / timings["numba"]
        print(f"{name:28s} {timings['numpy']:12.2f} {timings['numba']:12.2f} {speedup:7.1f}x")


if __name__ == "__main__":
    main()
