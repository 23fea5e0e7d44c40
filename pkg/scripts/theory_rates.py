"""Semi-theoretical rate and optimality table over a grid of L2 = log log x.

For each nu and L2: sup_t |predict_cdf - Phi(2t)|, its sqrt(L2)-scaled value,
the centre deviation d = sqrt(L2) (predict_cdf(0) - 1/2) and its expected
limit -sqrt(2/pi) tau / 4.

    python3 scripts/theory_rates.py --L2 16 25 36 49 100 400 --out runs/theory_rates.csv
"""

import argparse
import csv
import sys

from medfactor.analysis import theory_deviation
from medfactor.special import SQRT_2_OVER_PI
from medfactor.theory import estimate_tau, integration_window, scale_from_log2, scaled_center_deviation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L2", type=float, nargs="+", default=[16, 25, 36, 49, 100, 200, 400])
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["nu", "L2", "window_lo", "sup_dev", "scaled_sup_dev", "max_cdf", "d", "d_limit"])
    for nu in ("omega", "Omega"):
        limit = -SQRT_2_OVER_PI * estimate_tau(nu) / 4
        for L2 in args.L2:
            s = scale_from_log2(L2)
            rep = theory_deviation(nu, s)
            d = scaled_center_deviation(nu, s)
            w.writerow([nu, f"{L2:g}", f"{integration_window(nu, s)[0]:.6f}", f"{rep.sup_dev:.12g}",
                        f"{rep.scaled_sup_dev:.12g}", f"{rep.empirical.max():.12g}", f"{d:.12g}", f"{limit:.12g}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
