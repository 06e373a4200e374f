"""Log-log plot of err_n from ``incsmooth minerr`` CSV files (needs matplotlib).

    python scripts/plot_minerr.py results/minerr_c1_log4.csv results/minerr_c1_log8.csv -o minerr.png
"""

import argparse
import csv
from pathlib import Path

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError as exc:  # optional extra
    raise SystemExit("plotting needs matplotlib: pip install .[plot]") from exc


def load(path):
    lines = [line for line in Path(path).read_text().splitlines() if not line.startswith("#")]
    rows = list(csv.DictReader(lines))
    n = [int(r["n"]) for r in rows if int(r["n"]) > 0]
    err = [float(r["err_all"]) for r in rows if int(r["n"]) > 0]
    pred = rows[0]["predicted_decay"]
    return n, err, float(pred) if pred not in ("", "inf") else None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--output", default="minerr.png")
    args = ap.parse_args()
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.csv:
        n, err, pred = load(path)
        line, = ax.loglog(n, err, marker=".", label=Path(path).stem)
        if pred is not None:
            ax.loglog(n, [err[0] * (k / n[0]) ** -pred for k in n], ls="--", color=line.get_color(), lw=0.8)
    ax.set_xlabel("n")
    ax.set_ylabel("err_n")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(args.output)


if __name__ == "__main__":
    main()
