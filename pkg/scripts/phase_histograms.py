"""Phase histograms of the teacher network before and after reflector
optimization, plus per-layer phase totals."""
import argparse

import numpy as np

from ipnn_opt.network import make_teacher, phase_histogram
from ipnn_opt.reflect import AnnealingSchedule, optimize_network


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bins", type=int, default=16)
    ap.add_argument("--mode", choices=("sa", "exhaustive"), default="sa")
    args = ap.parse_args()

    net, _ = make_teacher([16, 16, 16, 10], samples=2000, seed=0)
    results = optimize_network(net.layers, AnnealingSchedule(seed=0), args.mode)
    opt = net.with_layers([r[0] for r in results])
    before, after = phase_histogram(net, args.bins), phase_histogram(opt, args.bins)

    for k, (f, res) in enumerate(results):
        print(f"layer {k} {f.shape}: {res.initial_objective:.2f} -> {res.best_objective:.2f} rad "
              f"({res.reduction_percent:.2f}%)")
    print(f"total: {before.total:.2f} -> {after.total:.2f} rad "
          f"({100 * (before.total - after.total) / before.total:.2f}%)")
    print(f"{'bin':>14} {'before':>7} {'after':>7}")
    for lo, hi, a, b in zip(before.edges[:-1], before.edges[1:], before.counts, after.counts):
        print(f"[{lo:5.2f},{hi:5.2f}) {a:7d} {b:7d}")
    print(f"median per layer: {np.round(before.layer_medians, 3)} -> {np.round(after.layer_medians, 3)}")


if __name__ == "__main__":
    main()
