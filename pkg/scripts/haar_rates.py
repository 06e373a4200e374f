"""Worst-case midpoint interpolation errors on the Haar space.

For each smoothness r and level n, prints the worst-case error over the unit
ball (exact up to level ``n + extra``, bracketed beyond), the proven bound
and the ratio to the previous level, which should approach ``2^(-r/2)``.

    python scripts/haar_rates.py --r 1.5 2 4 --n-max 8 --extra 10
"""

import argparse

from incsmooth.haar_approx import worst_case_error


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=float, nargs="+", default=[1.5, 2.0, 4.0])
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--extra", type=int, default=10)
    ap.add_argument("--weighting", choices=["nu", "block"], default="nu")
    args = ap.parse_args()
    print("r,n,worst_lower,worst_upper,bound,ratio,target")
    for r in args.r:
        prev = None
        for n in range(args.n_max + 1):
            wc = worst_case_error(n, r, n + args.extra, args.weighting)
            ratio = "" if prev is None else f"{wc.lower / prev:.6f}"
            print(f"{r:g},{n},{wc.lower:.8e},{wc.upper:.8e},{wc.bound:.8e},{ratio},{2 ** (-r / 2):.6f}")
            prev = wc.lower


if __name__ == "__main__":
    main()
