"""Decode throughput: compiled kernel vs the pure-Python fallback.

    python benchmarks/bench_decode.py [--sizes 20,100,1000] [--repeat 200]
"""
import argparse
import random
import time

from cubeplan import kernel
from cubeplan.cbl import decode_indices
from cubeplan.model import BlockSpec, Design, DesignConfig, ImplementationCandidate


def make_design(n, z_con, rng):
    blocks = tuple(
        BlockSpec(f"b{i}", f"b{i}", tuple(
            ImplementationCandidate(rng.uniform(1, 10), rng.uniform(1, 10), rng.randint(1, z_con))
            for _ in range(rng.randint(1, 3))))
        for i in range(n))
    return Design(blocks, (), (), DesignConfig(layer_limit=z_con, whitespace_fraction=0.0))


def make_inputs(design, count, rng):
    out = []
    n = design.n
    for _ in range(count):
        S = list(range(n))
        rng.shuffle(S)
        L = [rng.randrange(3) for _ in range(n - 1)]
        T = [rng.randint(0, 1) for _ in range(2 * n)]
        sel = [rng.randrange(len(b.candidates)) for b in design.blocks]
        out.append((S, L, T, sel))
    return out


def time_kernel(fn, design, inputs):
    t0 = time.perf_counter()
    for S, L, T, sel in inputs:
        decode_indices(S, L, T, sel, design, True, kernel=fn)
    return (time.perf_counter() - t0) / len(inputs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="20,100,1000")
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--layers", type=int, default=2)
    args = ap.parse_args()
    rng = random.Random(0)
    print(f"active backend: {kernel.BACKEND}")
    print(f"{'n':>6} {'python (us)':>12} {'cython (us)':>12} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        design = make_design(n, args.layers, rng)
        reps = max(3, args.repeat * 20 // n)
        inputs = make_inputs(design, reps, rng)
        py = time_kernel(kernel.py_decode_kernel, design, inputs)
        if kernel.BACKEND == "cython":
            cy = time_kernel(kernel.decode_kernel, design, inputs)
            print(f"{n:>6} {py * 1e6:>12.1f} {cy * 1e6:>12.1f} {py / cy:>7.1f}x")
        else:
            print(f"{n:>6} {py * 1e6:>12.1f} {'n/a':>12} {'':>8}")


if __name__ == "__main__":
    main()
