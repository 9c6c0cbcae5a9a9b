"""1/F of a single MZI under a uniform relative phase error, over the full
(theta, phi) torus. Prints quadrant means and writes the grid as CSV."""
import argparse

import numpy as np

from ipnn_opt import io
from ipnn_opt.mesh import fidelity_surface


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta-rel", type=float, default=0.1)
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--out", default="fidelity_surface.csv")
    args = ap.parse_args()

    rows = fidelity_surface(args.delta_rel, args.grid)
    io.write_results(io.ResultsTable("fidelity_surface", rows), args.out)
    theta, phi, inv = np.array(rows).T
    for name, t_hi, p_hi in (("[0,pi)^2", False, False), ("[pi,2pi)^2", True, True),
                             ("theta high", True, False), ("phi high", False, True)):
        mask = ((theta >= np.pi) == t_hi) & ((phi >= np.pi) == p_hi)
        print(f"{name:>12}: mean 1/F = {inv[mask].mean():.5f}  max = {inv[mask].max():.5f}")


if __name__ == "__main__":
    main()
