#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the term-batched matvec (the Lanczos inner loop) and dense
materialization on a grid of register sizes. Run after an editable install:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import time
import numpy as np

from syklab import backend
from syklab.ensembles import sample_syk
from syklab.majorana import PackedTerms


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_case(n, p, repeats):
    inst = sample_syk(n, 4, p, seed=1)
    packed = PackedTerms(inst.terms, n)
    dim = packed.dim
    rng = np.random.default_rng(0)
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    out = np.zeros(dim, dtype=complex)

    def run(impl):
        out[:] = 0
        impl(packed.x_masks, packed.z_masks, packed.weights, vec, out)

    compiled_t = best_of(lambda: run(backend.apply_terms), repeats)
    pure_t = best_of(lambda: run(backend.pure_apply_terms), repeats)
    return len(packed), dim, compiled_t, pure_t


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--max-n", type=int, default=12)
    args = parser.parse_args()

    if backend.BACKEND != "compiled":
        print("note: compiled extension unavailable; both columns run the "
              "numpy fallback")
    print(f"{'n':>3} {'dim':>6} {'terms':>7} {'compiled':>10} {'numpy':>10} "
          f"{'speedup':>8}")
    for n in (6, 8, 10, args.max_n):
        terms, dim, ct, pt = bench_case(n, 1.0, args.repeats)
        print(f"{n:>3} {dim:>6} {terms:>7} {ct:>9.4f}s {pt:>9.4f}s "
              f"{pt / ct:>7.1f}x")


if __name__ == "__main__":
    main()
