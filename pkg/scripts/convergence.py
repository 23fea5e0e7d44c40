"""Combined convergence table: empirical rows at sieveable x, theory rows beyond.

    python3 scripts/convergence.py --nu omega --x 1e5 1e6 1e7 --L2 25 100 400 --out runs/conv_omega.csv
"""

import argparse

from medfactor.analysis import convergence_study
from medfactor.manifest import atomic_write


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nu", choices=["omega", "Omega"], required=True)
    ap.add_argument("--x", type=float, nargs="*", default=[1e5, 1e6, 1e7])
    ap.add_argument("--L2", type=float, nargs="*", default=[16, 25, 49, 100, 400])
    ap.add_argument("--out")
    args = ap.parse_args()
    rep = convergence_study(args.nu, [int(x) for x in args.x], args.L2)
    text = rep.to_csv()
    if args.out:
        atomic_write(args.out, text)
    print(text, end="")


if __name__ == "__main__":
    main()
