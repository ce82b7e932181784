#!/usr/bin/env python3
"""Benchmark the compiled kernels against their numpy/python twins.

Runs every hot kernel on identical inputs through both backends, checks the
outputs agree, and prints wall times and speedups. Requires numba (the
compiled side); run with HYPERPERC_BACKEND=auto or numba.
"""

import time

import numpy as np

from hyperperc import _kernels
from hyperperc.tiling import TilingSpec, build_ball


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    impls = _kernels.implementations()
    if "numba" not in impls:
        raise SystemExit("numba backend unavailable; nothing to compare")
    nb, py = impls["numba"], impls["numpy"]

    g = build_ball(TilingSpec(3, 7, 7))
    active = _kernels.bernoulli(g.n, 0.5, 1, 0)
    rows = []

    def bench(name, fn_nb, fn_py, args_nb, args_py=None, check=None):
        args_py = args_py if args_py is not None else args_nb
        out_nb, t_nb = timed(fn_nb, *args_nb)
        out_py, t_py = timed(fn_py, *args_py, repeat=1)
        agree = check(out_nb, out_py) if check else np.array_equal(out_nb, out_py)
        rows.append((name, t_nb, t_py, t_py / t_nb, agree))

    bench("bernoulli 1e6", nb["bernoulli"], py["bernoulli"],
          (1_000_000, 0.5, 7, 3))

    def mk_uf(impl):
        def run(indptr, indices, act):
            parent = np.empty(act.shape[0], np.int64)
            out = np.empty(act.shape[0], np.int64)
            return impl(indptr, indices, act, parent, out)
        return run
    bench(f"uf_label n={g.n}", mk_uf(nb["uf_label"]), mk_uf(py["uf_label"]),
          (g.indptr, g.neighbors, active))

    a_indptr, a_idx = _kernels._flatten_sets([[0], [0]])
    b_indptr, b_idx = _kernels._flatten_sets([[50], [400]])
    bench("pairs_connect_mc 200x", nb["pairs_connect_mc"],
          py["pairs_connect_mc"],
          (g.indptr, g.neighbors, a_indptr, a_idx, b_indptr, b_idx,
           0.5, 11, 0, 200, 1))

    core = (g.distances_from([0]) <= 2).astype(np.uint8)
    bnd = g.boundary.astype(np.uint8)
    bench("crossing_count_mc 100x", nb["crossing_count_mc"],
          py["crossing_count_mc"],
          (g.indptr, g.neighbors, core, bnd, 0.5, 13, 0, 100, 1))

    def mk_ball(impl):
        def run():
            cap = 40_000
            rot = np.full((cap, 7), -1, np.int32)
            deg = np.zeros(cap, np.int32)
            complete = np.zeros(cap, np.uint8)
            dist = np.zeros(cap, np.int32)
            n = impl(3, 7, 8, rot, deg, complete, dist, cap)
            return np.array([n])
        return run
    bench("pq_ball {3,7} R=8", mk_ball(nb["pq_ball"]), mk_ball(py["pq_ball"]),
          ())

    m = 18
    rng = np.random.default_rng(0)
    masks = np.zeros(m, np.int64)
    for v in range(m):
        for w in rng.integers(0, m, 3):
            if w != v:
                masks[v] |= 1 << int(w)
                masks[int(w)] |= 1 << v
    targets = np.array([1 << (m - 1)], dtype=np.int64)

    def mk_reach(impl):
        def run():
            counts = np.zeros((1, m + 1), np.int64)
            return impl(masks, 0, targets, counts)
        return run
    bench(f"reach_counts 2^{m}", mk_reach(nb["reach_counts"]),
          mk_reach(py["reach_counts"]), ())

    print(f"{'kernel':26s} {'numba':>10s} {'numpy/py':>10s} "
          f"{'speedup':>9s}  agree")
    for name, t_nb, t_py, speed, agree in rows:
        print(f"{name:26s} {t_nb * 1e3:9.2f}ms {t_py * 1e3:9.2f}ms "
              f"{speed:8.1f}x  {agree}")


if __name__ == "__main__":
    main()
