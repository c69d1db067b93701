"""Two-particle fringe pattern around the matched arm offsets.

Scans ell1 across a few fringe periods at fixed ell2 and writes P_pp together
with the envelope, computed both in closed form and, optionally, by direct
quadrature over the momentum distribution.

    python scripts/fringe_pattern.py --tau 1 --T 2 --periods 3 --quadrature > fringe.csv
"""
import argparse
import csv
import math
import sys

import numpy as np

from dtebell.dte import DteSettings, dte_fringe_scan
from dtebell.oracle import dte_probabilities_quadrature, gaussian_distribution
from dtebell.params import DteParams
from dtebell.validation import LI6_MASS, LI6_V_REL


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--tau", type=float, default=1.0)
    ap.add_argument("--T", type=float, default=2.0, help="T_cm = T_rel in seconds")
    ap.add_argument("--periods", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=241)
    ap.add_argument("--quadrature", action="store_true", help="add a quadrature column")
    args = ap.parse_args(argv)

    p = DteParams.from_dispersion_times(LI6_MASS, LI6_V_REL, T_cm=args.T, T_rel=args.T, tau=args.tau)
    l1c, l2c = p.matched_ell
    half = args.periods * 2 * math.pi * p.lambdabar_rel
    rows = dte_fringe_scan(p, l2c, (l1c - half, l1c + half, args.points))
    psi = gaussian_distribution(p) if args.quadrature else None

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["offset_over_lambdabar", "P_pp", "visibility"] + (["P_pp_quadrature"] if psi else []))
    for r in rows:
        out = [f"{(r.ell1 - l1c) / p.lambdabar_rel:.8g}", f"{r.P_pp:.15g}", f"{r.visibility:.15g}"]
        if psi is not None:
            probs, _, _ = dte_probabilities_quadrature(psi, p, DteSettings(r.ell1, l2c))
            out.append(f"{probs[0]:.15g}")
        w.writerow(out)


if __name__ == "__main__":
    main()
