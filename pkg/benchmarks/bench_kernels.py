"""Compiled vs pure-Python kernels on the symmetric-product hot paths.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--workers 1]
"""

import argparse
import time

import numpy as np

from xxzdrop import kernels
from xxzdrop.graph_core import build_lattice_window
from xxzdrop.sym_product import SymSpace

CASES = [
    ("path[40] N=3", "path", [40], 3),
    ("path[20] N=5", "path", [20], 5),
    ("grid2d[6,6] N=4", "grid2d", [6, 6], 4),
    ("strip[2,12] N=6", "strip", [2, 12], 6),
]


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(backend, family, dims, N, repeat, workers):
    G = build_lattice_window(family, dims)
    v = np.random.default_rng(0).standard_normal(SymSpace(G, N).dimension)
    out = {}
    out["configs"] = _best(lambda: SymSpace(G, N, backend=backend, workers=workers).configs, repeat)
    out["surfaces"] = _best(lambda: SymSpace(G, N, backend=backend, workers=workers).surfaces, repeat)
    out["neighbor_csr"] = _best(lambda: SymSpace(G, N, backend=backend, workers=workers).neighbor_csr, repeat)
    free = SymSpace(G, N, backend=backend, workers=workers)
    out["matvec_free"] = _best(lambda: free.apply_adjacency(v), repeat)
    csr = SymSpace(G, N, backend=backend, workers=workers)
    csr.neighbor_csr
    out["matvec_csr"] = _best(lambda: csr.apply_adjacency(v), repeat)
    out["bfs"] = _best(lambda: csr.bfs_from([0]), repeat)
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    backends = sorted(kernels.available_backends())
    if "cython" not in backends:
        print("compiled extension not built; only the python backend is available")
    print(f"{'case':<18} {'kernel':<13} " + " ".join(f"{b:>10}" for b in backends) + "    speedup")
    for name, family, dims, N in CASES:
        res = {b: bench(b, family, dims, N, args.repeat, args.workers) for b in backends}
        for kernel in res[backends[0]]:
            times = [res[b][kernel] for b in backends]
            speed = res["python"][kernel] / res["cython"][kernel] if "cython" in res else float("nan")
            print(f"{name:<18} {kernel:<13} " + " ".join(f"{t * 1e3:>8.2f}ms" for t in times)
                  + f"   {speed:>6.1f}x")


if __name__ == "__main__":
    main()
