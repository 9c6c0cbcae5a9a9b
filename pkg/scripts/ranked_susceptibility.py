"""Accuracy loss when noise hits only the largest or only the smallest
phases of each layer, on the teacher task."""
import argparse

from ipnn_opt.network import GaussianPhaseNoise, Ranked, accuracy_loss_report, make_teacher


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma-rel", type=float, default=0.2)
    ap.add_argument("--iterations", type=int, default=10)
    ap.add_argument("--teacher-seed", type=int, default=0)
    ap.add_argument("--fractions", default="5,10,20,50")
    args = ap.parse_args()

    net, ds = make_teacher([16, 16, 16, 10], samples=2000, seed=args.teacher_seed)
    noise = GaussianPhaseNoise(args.sigma_rel, seed=0)
    print(f"nominal accuracy {accuracy_loss_report(net, ds, noise, Ranked(0, 0), 1).nominal_accuracy:.4f}")
    print(f"{'f%':>5} {'top loss':>12} {'bottom loss':>12}")
    for f in (float(v) for v in args.fractions.split(",")):
        hi = accuracy_loss_report(net, ds, noise, Ranked(f, 0), args.iterations)
        lo = accuracy_loss_report(net, ds, noise, Ranked(0, f), args.iterations)
        print(f"{f:5.0f} {hi.mean_loss:7.2f}({hi.std_loss:4.1f}) {lo.mean_loss:7.2f}({lo.std_loss:4.1f})")


if __name__ == "__main__":
    main()
