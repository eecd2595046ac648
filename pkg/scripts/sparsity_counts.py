"""Nonzero counts of lasso and gc on a synthetic block cohort shaped like a clinical panel.

Budgets are chosen on a holdout (one fifth of the cohort), then refit on everything.

    python scripts/sparsity_counts.py --rhos 0.7 0.9
"""

import argparse
import time

from gflasso.evaluation import count_nonzero
from gflasso.graph import TraitGraph, build_graph
from gflasso.selection import SearchConfig, select_and_fit
from gflasso.simulation import simulate_block_cohort

BLOCKS = (8, 8, 6, 6, 5, 5, 4, 4, 3, 2, 1, 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=543)
    ap.add_argument("--snps", type=int, default=34)
    ap.add_argument("--snps-per-block", type=int, default=2)
    ap.add_argument("--effect-size", type=float, default=1.0)
    ap.add_argument("--within-corr", type=float, default=0.6)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--rhos", type=float, nargs="+", default=[0.7, 0.9])
    args = ap.parse_args()

    data = simulate_block_cohort(args.n, args.snps, BLOCKS, (args.snps_per_block,) * len(BLOCKS),
                                 args.effect_size, args.within_corr, seed=args.seed)
    x, y = data.genotypes.centered, data.phenotypes.values
    config = SearchConfig(holdout=args.n // 5, seed=args.seed)
    cache = {}

    t0 = time.time()
    beta, trace = select_and_fit(x, y, TraitGraph(y.shape[1], ()), "lasso", config, lasso_cache=cache)
    lasso = count_nonzero(beta)
    print(f"lasso        nonzero={lasso:4d}  s1={trace.chosen[0]:.3f}  ({time.time() - t0:.0f}s)")
    for rho in args.rhos:
        graph = build_graph(data.phenotypes, rho)
        t0 = time.time()
        beta, trace = select_and_fit(x, y, graph, "gc", config, lasso_cache=cache)
        n = count_nonzero(beta)
        print(f"gc rho={rho:.2f} nonzero={n:4d}  edges={graph.n_edges:3d}  "
              f"ratio={n / lasso:.3f}  s=({trace.chosen[0]:.3f}, {trace.chosen[1]:.3f})  "
              f"({time.time() - t0:.0f}s)")


if __name__ == "__main__":
    main()
