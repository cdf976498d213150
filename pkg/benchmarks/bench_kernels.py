"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from dtckit import kernels


def cases(rng):
    n = 10
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    mats = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    C = rng.normal(size=(n, n))
    C = C + C.T
    np.fill_diagonal(C, 0)
    h = [rng.normal(size=n) for _ in range(3)]
    C6 = C[:6, :6]
    d = [rng.normal(size=6) for _ in range(2)]
    theta = rng.uniform(2.5, 3.8, 10**4)
    kappa = rng.uniform(-2, 2, 10**4)
    g = np.array([1.0, 0.5, -0.5])
    return {
        "apply_local n=10": lambda m: m.apply_local(psi, mats),
        "x_expectations n=10": lambda m: m.x_expectations(psi, n),
        "spin_half_hamiltonian n=10": lambda m: m.spin_half_hamiltonian(n, C, *h, -0.5, -0.5, 1.0),
        "spin_one_hamiltonian n=6": lambda m: m.spin_one_hamiltonian(6, C6, *d),
        "fixed_point_batch 1e4": lambda m: m.fixed_point_batch(theta, kappa, g, 0.5, 1e-12, 2000),
        "population_fixed_point 1e4": lambda m: m.population_fixed_point(theta, kappa, 1.0, 0.5,
                                                                         1e-6, 2000),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the Python timings are shown")
    names = sorted(backends)
    print("kernel\t" + "\t".join(f"{b}[ms]" for b in names) + "\tspeedup[1]")
    for label, fn in cases(np.random.default_rng(0)).items():
        t = {}
        for b in names:
            mod = backends[b]
            t[b] = 1e3 * min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        speed = t["python"] / t["cython"] if "cython" in t else float("nan")
        print(f"{label}\t" + "\t".join(f"{t[b]:.3f}" for b in names) + f"\t{speed:.1f}")


if __name__ == "__main__":
    main()
