"""Timing comparison of the walk kernels: numba against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--nodes 500 3000] [--repeat 3]

Times walk_table (random-walk simulation) and pair_counts (windowed
co-occurrence accumulation) on SBM graphs of increasing size. The first numba
call includes JIT compilation, so one warmup run precedes the timed ones.
"""
import argparse
import time

import numpy as np

from graphshift.backend import HAVE_NUMBA
from graphshift.graph_io import SyntheticConfig, generate_pair
from graphshift.walks import WalkConfig, pair_counts, walk_table


def _make_graph(n, seed):
    cfg = SyntheticConfig(n_nodes=n, n_classes=4, attr_dim=4, p_in=min(1.0, 20.0 / n),
                          p_out=min(1.0, 4.0 / n), seed=seed)
    return generate_pair(cfg).source


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(n_nodes, repeat):
    g = _make_graph(n_nodes, seed=42)
    wcfg = WalkConfig(walks_per_node=10, walk_length=40, window=5, seed=7)
    rows = []
    for name in ("numba", "numpy"):
        if name == "numba" and not HAVE_NUMBA:
            print("numba not installed; skipping")
            continue
        walk_table(g.adjacency, wcfg, name)  # warmup (JIT compile on first call)
        t_walk, (walks, lengths) = _time(lambda: walk_table(g.adjacency, wcfg, name), repeat)
        pair_counts(walks, lengths, wcfg.window, g.n_nodes, wcfg.count_self, name)
        t_pairs, f = _time(
            lambda: pair_counts(walks, lengths, wcfg.window, g.n_nodes, wcfg.count_self, name),
            repeat)
        rows.append((name, t_walk, t_pairs, f.nnz))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, nargs="+", default=[500, 3000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"{'nodes':>7s} {'backend':>8s} {'walk_table':>12s} {'pair_counts':>12s} {'nnz':>10s}")
    for n in args.nodes:
        rows = bench(n, args.repeat)
        base = {}
        for name, tw, tp, nnz in rows:
            base[name] = (tw, tp)
            print(f"{n:>7d} {name:>8s} {tw * 1e3:>10.1f}ms {tp * 1e3:>10.1f}ms {nnz:>10d}")
        if len(rows) == 2:
            tw_ratio = base["numpy"][0] / base["numba"][0]
            tp_ratio = base["numpy"][1] / base["numba"][1]
            print(f"{'':>7s} {'speedup':>8s} {tw_ratio:>11.1f}x {tp_ratio:>11.1f}x")


if __name__ == "__main__":
    main()
