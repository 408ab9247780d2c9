#!/usr/bin/env python3
"""
Suppression phase diagram: verdict heat map over (A, lambda) from a sweep's
phase table.  Each sweep cell becomes one tile; duplicate cells are an error.
"""

import argparse
import sys

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

from common import PALETTE, VERDICT_COLORS, CsvFormatError, floats, read_table  # noqa: E402


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="infile", required=True,
                        help="phase_table.csv from a sweep")
    parser.add_argument("--out", dest="outfile", required=True)
    args = parser.parse_args(argv)

    try:
        cols = read_table(args.infile, ["A", "lambda", "verdict"])
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    a_vals = floats(cols["A"], args.infile, "A")
    lam_vals = floats(cols["lambda"], args.infile, "lambda")
    verdicts = cols["verdict"]
    if not a_vals:
        print("error: empty phase table", file=sys.stderr)
        return 2

    cells = {}
    for a, lam, v in zip(a_vals, lam_vals, verdicts):
        key = (a, lam)
        if key in cells:
            print(f"error: duplicate cell A={a}, lambda={lam}", file=sys.stderr)
            return 2
        cells[key] = v

    a_axis = sorted(set(a_vals))
    lam_axis = sorted(set(lam_vals))
    categories = ["healthy", "warning", "blown_up", "error"]
    color_of = dict(VERDICT_COLORS, error=PALETTE["grey"])
    index = np.full((len(lam_axis), len(a_axis)), len(categories) - 1, dtype=int)
    for (a, lam), v in cells.items():
        cat = v if v in categories else "error"
        index[lam_axis.index(lam), a_axis.index(a)] = categories.index(cat)

    fig, ax = plt.subplots(figsize=(6, 4.5))
    cmap = ListedColormap([color_of[c] for c in categories])
    ax.imshow(index, origin="lower", aspect="auto", cmap=cmap,
              vmin=-0.5, vmax=len(categories) - 0.5, interpolation="nearest")
    ax.set_xticks(range(len(a_axis)), [f"{a:g}" for a in a_axis])
    ax.set_yticks(range(len(lam_axis)), [f"{v:g}" for v in lam_axis])
    ax.set_xlabel("shear amplitude A")
    ax.set_ylabel("data scale lambda")
    ax.set_title("suppression phase diagram")
    present = sorted({v if v in categories else "error" for v in cells.values()},
                     key=categories.index)
    ax.legend(handles=[Patch(color=color_of[c], label=c) for c in present],
              loc="upper left", bbox_to_anchor=(1.02, 1.0))
    fig.tight_layout()
    fig.savefig(args.outfile)
    return 0


if __name__ == "__main__":
    sys.exit(main())
