"""Paired accuracy-loss sweep over sigma_rel for the conventional and the
reflector-optimized teacher networks, repeated over several teacher seeds."""
import argparse

from ipnn_opt.network import make_teacher, robustness_sweep
from ipnn_opt.reflect import AnnealingSchedule, optimize_network


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--teacher-seeds", type=int, default=3)
    ap.add_argument("--sigma-rels", default="0.01,0.02,0.05,0.1,0.2")
    ap.add_argument("--iterations", type=int, default=10)
    args = ap.parse_args()
    sigmas = [float(s) for s in args.sigma_rels.split(",")]

    for seed in range(args.teacher_seeds):
        net, ds = make_teacher([16, 16, 16, 10], samples=2000, seed=seed)
        opt = net.with_layers([r[0] for r in optimize_network(net.layers, AnnealingSchedule(seed=0))])
        print(f"teacher seed {seed}")
        for p in robustness_sweep(net, opt, ds, sigmas, args.iterations):
            print(f"  sigma={p.sigma_rel:5.2f}  conventional {p.conventional.mean_loss:6.2f}pp  "
                  f"optimized {p.optimized.mean_loss:6.2f}pp  reduction {p.loss_reduction_percent:6.2f}%")


if __name__ == "__main__":
    main()
