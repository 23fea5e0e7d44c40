"""Desk-scale run: sieve both nu up to x, then deviation, local-law ratios and envelope.

    python3 scripts/desk_scale.py --x 100000000 --out runs/desk
"""

import argparse
import json
import os
import time

from medfactor import __version__
from medfactor.analysis import lemma1_envelope_check, median_ratio, prefactor_drift, ratio_csv, ratio_table, sup_deviation
from medfactor.empirical import accumulate_both, counts_to_json
from medfactor.manifest import RunManifest, atomic_write


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=int, default=10**8)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="runs/desk")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    m = RunManifest("scripts/desk_scale.py", vars(args), __version__)

    t0 = time.perf_counter()
    counts = accumulate_both(args.x, workers=args.workers)
    print(f"sieved x={args.x} in {time.perf_counter() - t0:.1f}s")

    summary = {}
    for nu, c in counts.items():
        dev = sup_deviation(c)
        rows = ratio_table(c, (0.45, 0.55))
        env = lemma1_envelope_check(c)
        summary[nu] = {
            "L2": dev.s.L2,
            "sup_dev": dev.sup_dev,
            "scaled_sup_dev": dev.scaled_sup_dev,
            "median_ratio": median_ratio(rows),
            "ratio_rows": len(rows),
            "envelope": env.describe(),
        }
        if nu == "omega":
            summary[nu]["prefactor_drift"] = prefactor_drift(c)
        files = {
            f"counts_{nu}.json": counts_to_json(c),
            f"deviation_{nu}.csv": dev.to_csv(),
            f"ratio_{nu}.csv": ratio_csv(rows),
        }
        for name, text in files.items():
            path = os.path.join(args.out, name)
            m.output_checksums[path] = atomic_write(path, text)
        print(f"{nu:>5}: scaled sup dev {dev.scaled_sup_dev:.3f}, median ratio {summary[nu]['median_ratio']:.3f} "
              f"over {len(rows)} primes; {env.describe()}")

    path = os.path.join(args.out, "summary.json")
    m.output_checksums[path] = atomic_write(path, json.dumps(summary, indent=2) + "\n")
    m.finish().write_beside(os.path.join(args.out, "desk_scale"))


if __name__ == "__main__":
    main()
