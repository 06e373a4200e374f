"""Minimal errors of the H product and their fitted decay over growing windows.

Writes one CSV per family with the fitted slope on each window
``[10^k, 10^(k+1)]`` and on ``[10, n]``, next to the predicted decay.

    python scripts/minerr_decay.py --n-max 100000 --out results
"""

import argparse
import csv
import math
import time
from pathlib import Path

from incsmooth.sequences import decay_fit
from incsmooth.spectra import min_errors_all, predicted_decay_all
from incsmooth.weights import Rule, WeightFamily

FAMILIES = {
    "log4": Rule.log(3, 4),
    "log8": Rule.log(3, 8),
    "linear1": Rule.linear(3, 1),
}


def windows(n_max):
    k = 1
    while 10 ** (k + 1) <= n_max:
        yield 10**k, 10 ** (k + 1)
        k += 1


def run(name, rule, n_max, out):
    fam = WeightFamily.polynomial("A2", rule)
    t0 = time.perf_counter()
    errs = min_errors_all(fam, n_max, "H", max_coordinate=10 * n_max)
    elapsed = time.perf_counter() - t0
    predicted = predicted_decay_all(fam, "H")
    rows = [("10", str(n_max), decay_fit(errs[1:], 10, n_max).slope)]
    rows += [(str(lo), str(hi), decay_fit(errs[1:], lo, hi).slope) for lo, hi in windows(n_max)]
    path = out / f"minerr_decay_{name}.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["window_lo", "window_hi", "fitted_slope", "predicted_decay"])
        for lo, hi, s in rows:
            w.writerow([lo, hi, repr(s), repr(predicted)])
    print(f"{name}: predicted {predicted:.4f}, fitted on [10, {n_max}] {rows[0][2]:.4f}, "
          f"pointwise {-math.log(errs[-1]) / math.log(n_max):.4f}  ({elapsed:.1f}s) -> {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=10**5)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--family", choices=sorted(FAMILIES), action="append")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.family or FAMILIES:
        run(name, FAMILIES[name], args.n_max, args.out)


if __name__ == "__main__":
    main()
