"""Command-line entry point: ``ipnn-opt <command> ...``."""
import argparse
import sys

import numpy as np

from . import io
from .exceptions import BudgetExceededError, InvalidInputError, NumericalFailureError, ParseError
from .mesh import fidelity_surface
from .network import (GaussianPhaseNoise, Ipnn, RankedPerturbationSpec, classify, make_teacher,
                      phase_histogram, ranked_report, robustness_sweep)
from .reflect import AnnealingSchedule, factorize, optimize_network, phase_objective


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_decompose(args):
    w = io.read_matrix(args.input)
    layer = factorize(w)
    net = Ipnn((layer,), args.activation)
    io.write_network(args.output, net)
    err = layer.weight_error() / max(np.linalg.norm(w), 1e-300)
    print(f"reconstruction error (relative Frobenius): {err:.3e}")
    print(f"phase objective: {phase_objective(layer):.17g}")
    if err > args.tol:
        print(f"error: reconstruction error exceeds tolerance {args.tol:g}", file=sys.stderr)
        return 1
    return 0


def cmd_optimize(args):
    net = io.read_network(args.input)
    sched = AnnealingSchedule(args.t_init, args.alpha, args.epoch, args.k_max, args.seed)
    results = optimize_network(net.layers, sched, args.mode)
    trace = io.ResultsTable("sa_trace")
    before_total = after_total = 0.0
    for k, (f_old, (f_new, res)) in enumerate(zip(net.layers, results)):
        before, after = phase_objective(f_old), phase_objective(f_new)
        before_total += before
        after_total += after
        pct = 100.0 * (before - after) / before if before else 0.0
        print(f"layer {k} {f_old.shape[0]}x{f_old.shape[1]}: {before:.6f} -> {after:.6f} rad "
              f"({pct:.2f}% reduction, {res.trials_used} trials)")
        for trial, obj in res.objective_trace:
            trace.add(k, int(trial), float(obj))
    pct = 100.0 * (before_total - after_total) / before_total if before_total else 0.0
    print(f"total: {before_total:.6f} -> {after_total:.6f} rad ({pct:.2f}% reduction)")
    io.write_network(args.output, net.with_layers([r[0] for r in results]))
    if args.trace:
        io.write_results(trace, args.trace)
    return 0


def cmd_fidelity_surface(args):
    table = io.ResultsTable("fidelity_surface")
    for row in fidelity_surface(args.delta_rel, args.grid):
        table.add(*row)
    io.write_results(table, args.output)
    return 0


def cmd_ranked_perturb(args):
    net = io.read_network(args.network)
    ds = io.read_dataset(args.dataset)
    spec = RankedPerturbationSpec(args.f_high, args.f_low,
                                  GaussianPhaseNoise(args.sigma_rel, args.seed), args.iterations)
    rep = ranked_report(net, ds, spec)
    table = io.ResultsTable("ranked")
    table.add("summary", args.f_high, args.f_low, args.sigma_rel, -1,
              rep.nominal_accuracy, rep.mean_loss, rep.std_loss)
    for i, loss in enumerate(rep.per_iteration_losses):
        table.add("detail", args.f_high, args.f_low, args.sigma_rel, i, rep.nominal_accuracy, loss, 0.0)
    io.write_results(table, args.output)
    print(f"nominal accuracy {rep.nominal_accuracy:.4f}; accuracy loss "
          f"{rep.mean_loss:.3f} +/- {rep.std_loss:.3f} pp over {args.iterations} iterations")
    return 0


def cmd_robustness(args):
    conv = io.read_network(args.conventional)
    opt = io.read_network(args.optimized)
    ds = io.read_dataset(args.dataset)
    points = robustness_sweep(conv, opt, ds, args.sigma_rels, args.iterations, args.seed, args.tol)
    table = io.ResultsTable("robustness")
    for p in points:
        table.add("summary", p.sigma_rel, -1, p.conventional.mean_loss, p.conventional.std_loss,
                  p.optimized.mean_loss, p.optimized.std_loss, p.loss_reduction)
        print(f"sigma_rel {p.sigma_rel:g}: conventional {p.conventional.mean_loss:.3f} pp, "
              f"optimized {p.optimized.mean_loss:.3f} pp, reduction {p.loss_reduction_percent:.2f}%")
    for p in points:
        for i, (a, b) in enumerate(zip(p.conventional.per_iteration_losses,
                                       p.optimized.per_iteration_losses)):
            table.add("detail", p.sigma_rel, i, a, 0.0, b, 0.0, a - b)
    io.write_results(table, args.output)
    return 0


def cmd_make_teacher(args):
    net, ds = make_teacher(args.dims, args.samples, args.margin, args.seed, args.classes,
                           args.activation, args.threshold)
    io.write_network(args.out_network, net)
    io.write_dataset(args.out_dataset, ds)
    print(f"nominal accuracy: {classify(net, ds):.4f}")
    return 0


def cmd_histogram(args):
    net = io.read_network(args.network)
    h = phase_histogram(net, args.bins)
    table = io.ResultsTable("histogram")
    for lo, hi, c in zip(h.edges[:-1], h.edges[1:], h.counts):
        table.add(float(lo), float(hi), int(c))
    io.write_results(table, args.output)
    for k, (med, mean, tot) in enumerate(zip(h.layer_medians, h.layer_means, h.layer_sums)):
        print(f"layer {k}: median {med:.4f} mean {mean:.4f} sum {tot:.4f}")
    print(f"overall mean phase {h.mean:.4f} rad, total {h.total:.4f} rad")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ipnn-opt", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("decompose", help="SVD a weight matrix into two Clements meshes")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--activation", default="modulus-relu")
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("optimize", help="search reflectors that minimize total phase")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--mode", choices=("sa", "exhaustive"), default="sa")
    s.add_argument("--t-init", type=float, default=10.0)
    s.add_argument("--alpha", type=float, default=0.8)
    s.add_argument("--epoch", type=int, default=2)
    s.add_argument("--k-max", type=int, default=256)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trace")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("fidelity-surface", help="1/F of one MZI over a (theta, phi) grid")
    s.add_argument("--delta-rel", type=float, default=0.1)
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_fidelity_surface)

    s = sub.add_parser("ranked-perturb", help="noise on the top/bottom ranked phases of each layer")
    s.add_argument("--network", required=True)
    s.add_argument("--dataset", required=True)
    s.add_argument("--f-high", type=float, default=0.0)
    s.add_argument("--f-low", type=float, default=0.0)
    s.add_argument("--sigma-rel", type=float, default=0.2)
    s.add_argument("--iterations", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_ranked_perturb)

    s = sub.add_parser("robustness", help="paired noise sweep over two equivalent networks")
    s.add_argument("--conventional", required=True)
    s.add_argument("--optimized", required=True)
    s.add_argument("--dataset", required=True)
    s.add_argument("--sigma-rels", type=_float_list, default=[0.05, 0.1, 0.15, 0.2])
    s.add_argument("--iterations", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_robustness)

    s = sub.add_parser("make-teacher", help="random teacher network and its labeled dataset")
    s.add_argument("--dims", type=_int_list, default=[16, 16, 16, 10])
    s.add_argument("--classes", type=int)
    s.add_argument("--samples", type=int, default=2000)
    s.add_argument("--margin", type=float, default=0.05)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--activation", default="modulus-relu")
    s.add_argument("--threshold", type=float, default=0.1)
    s.add_argument("--out-network", required=True)
    s.add_argument("--out-dataset", required=True)
    s.set_defaults(func=cmd_make_teacher)

    s = sub.add_parser("histogram", help="binned phases of a network")
    s.add_argument("--network", required=True)
    s.add_argument("--bins", type=int, default=32)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_histogram)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InvalidInputError, BudgetExceededError, NumericalFailureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
