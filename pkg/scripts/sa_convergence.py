"""Mean phase reduction of simulated annealing versus trial budget, relative
to the exhaustive optimum, for 10x10, 10x16 and 16x16 random matrices."""
import argparse

import numpy as np

from ipnn_opt.numerics import random_complex
from ipnn_opt.reflect import AnnealingSchedule, exhaustive_search, factorize, sa_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matrices", type=int, default=5)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--budgets", default="8,16,32,64,100,128,256,512")
    args = ap.parse_args()
    budgets = [int(b) for b in args.budgets.split(",")]

    rng = np.random.default_rng(2024)
    for rows, cols in ((10, 10), (10, 16), (16, 16)):
        layers = [factorize(random_complex(rows, cols, rng)) for _ in range(args.matrices)]
        optima = [exhaustive_search(f) for f in layers]
        print(f"{rows}x{cols}: exhaustive reduction "
              f"{np.mean([r.reduction_percent for r in optima]):.2f}%")
        for k in budgets:
            runs = [(sa_search(f, AnnealingSchedule(k_max=k, seed=s)), o)
                    for f, o in zip(layers, optima) for s in range(args.seeds)]
            red = [r.reduction_percent for r, _ in runs]
            gap = [(r.best_objective - o.best_objective) / o.best_objective for r, o in runs]
            print(f"  k_max={k:4d}  SA reduction {np.mean(red):6.2f}%  gap to optimum {100 * np.mean(gap):.3f}%")


if __name__ == "__main__":
    main()
