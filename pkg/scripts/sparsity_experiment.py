#!/usr/bin/env python3
"""Sparsity of the outer solver's final weights as the atom count grows.

Runs the 25-function suite at n=10 with a 100(n+1) evaluation budget for
m in {n, 5n, 10n, 20n} and prints the average fraction of atoms that end up
with zero weight. Larger m/n ratios should produce sparser combinations.
"""
import argparse

import numpy as np

from atomdfo import bench
from atomdfo.core import BudgetedObjective, OrdConfig, ZERO_TOL
from atomdfo.ord import ord_solve


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--multipliers", type=int, nargs="+", default=[1, 5, 10, 20])
    args = parser.parse_args()

    print(f"n={args.n}, budget={100 * (args.n + 1)}, seeds={args.seeds}")
    print(f"{'m':>6s} {'avg sparsity':>14s} {'avg nonzero atoms':>18s}")
    for mult in args.multipliers:
        m = mult * args.n
        sparsities = []
        active_sizes = []
        for seed in args.seeds:
            for name in bench.FUNCTION_NAMES:
                problem = bench.make_problem(name, args.n, m, seed)
                func = bench.make_test_function(name, args.n)
                objective = BudgetedObjective(func.value, budget=problem.budget)
                result = ord_solve(
                    objective, problem.atoms, OrdConfig(rng_seed=seed), problem.start_id
                )
                weights = np.zeros(m)
                weights[list(result.weights.ids)] = result.weights.w
                sparsities.append(float(np.mean(weights <= ZERO_TOL)))
                active_sizes.append(int(np.sum(weights > ZERO_TOL)))
        print(f"{m:>6d} {np.mean(sparsities):>13.2%} {np.mean(active_sizes):>18.2f}")


if __name__ == "__main__":
    main()
