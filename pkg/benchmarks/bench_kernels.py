"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from kickmaps._backend import available_backends


def cases(rng):
    q0 = rng.uniform(0, 2 * np.pi, 1000)
    p0 = rng.uniform(-3, 3, 1000)
    return {
        "bessel_jn(120, 14.4)": lambda k: k.bessel_jn(120, 14.4),
        "bessel_jn(400, 3.7)": lambda k: k.bessel_jn(400, 3.7),
        "dkrm_orbits 1000 seeds x 1000 steps": lambda k: k.dkrm_orbits(q0, p0, 1.0, 1.0, 1000),
        "harper_orbits 1000 seeds x 1000 steps": lambda k: k.harper_orbits(q0, p0, 1.0, 1.0, 1000),
        "dkrm_orbits 1 seed x 100000 steps": lambda k: k.dkrm_orbits(q0[:1], p0[:1], 1.0, 1.0, 100_000),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the fallback is timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':42s}" + "".join(f"{name:>14s}" for name in backends) + "   speed-up")
    for label, fn in cases(rng).items():
        times = {}
        for name, mod in backends.items():
            timer = timeit.Timer(lambda: fn(mod))
            n, _ = timer.autorange()
            times[name] = min(timer.repeat(args.repeat, n)) / n
        row = f"{label:42s}" + "".join(f"{times[n] * 1e3:11.3f} ms" for n in backends)
        if len(times) == 2:
            row += f"   {times['python'] / times['cython']:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
