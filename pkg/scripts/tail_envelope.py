"""Hall-Tenenbaum tail counts for Omega(n) >= b E(x) across x and b.

    python3 scripts/tail_envelope.py --x 1e4 1e5 1e6 --b 1.5 2 3
"""

import argparse

from medfactor.empirical import tail_count


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=float, nargs="+", default=[1e4, 1e5, 1e6])
    ap.add_argument("--b", type=float, nargs="+", default=[1.5, 2.0, 3.0])
    ap.add_argument("--nu", default="Omega", choices=["omega", "Omega"])
    args = ap.parse_args()
    print("x,b,E_of_x,count,bound,ratio,hypotheses_hold")
    for x in map(int, args.x):
        for b in args.b:
            r = tail_count(x, args.nu, (2, x), "above", b)
            print(f"{x},{b:g},{r.E_of_x:.6f},{r.count},{r.bound:.6g},{r.ratio:.6g},{r.hypotheses_hold}")


if __name__ == "__main__":
    main()
