#!/usr/bin/env python3
"""
Norm-decay figure from a run's diagnostics CSV.

Plots Y_d13, Y_omega and E_t against time on a log-linear axis and overlays
an exponential envelope C exp(-c t) fitted to the decaying stretch of the
director trace (the shear-enhanced decay rate the run realizes).
"""

import argparse
import json
import sys

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from common import PALETTE, CsvFormatError, floats, read_table  # noqa: E402


def fit_envelope(t: np.ndarray, trace: np.ndarray, floor: float):
    """Exponential envelope fit on the decaying stretch after the peak."""
    peak = int(np.argmax(trace))
    mask = np.arange(len(t)) >= peak
    mask &= trace > max(floor, 1e-14 * trace.max())
    if np.count_nonzero(mask) < 3 or trace.max() <= floor:
        return None
    slope, intercept = np.polyfit(t[mask], np.log(trace[mask]), 1)
    return slope, intercept


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="infile", required=True,
                        help="diagnostics CSV from a run directory")
    parser.add_argument("--out", dest="outfile", required=True,
                        help="output image (extension picks PNG or SVG)")
    parser.add_argument("--floor", type=float, default=1e-20,
                        help="axis floor for vanished traces")
    parser.add_argument("--fit-report", default=None,
                        help="optional JSON file for the fitted envelope rate")
    args = parser.parse_args(argv)

    try:
        cols = read_table(args.infile, ["t", "Y_d13", "Y_omega", "E_t"])
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    t = np.asarray(floats(cols["t"], args.infile, "t"))
    if len(t) < 10:
        print(f"error: need at least 10 rows, found {len(t)}", file=sys.stderr)
        return 2

    fig, ax = plt.subplots(figsize=(7, 4.5))
    styles = [("Y_d13", PALETTE["blue"]), ("Y_omega", PALETTE["orange"]),
              ("E_t", PALETTE["green"])]
    for name, color in styles:
        vals = np.asarray(floats(cols[name], args.infile, name))
        ax.semilogy(t, np.maximum(vals, args.floor), label=name, color=color)

    y_d13 = np.asarray(floats(cols["Y_d13"], args.infile, "Y_d13"))
    fit = fit_envelope(t, y_d13, args.floor)
    if fit is not None:
        slope, intercept = fit
        ax.semilogy(t, np.maximum(np.exp(intercept + slope * t), args.floor),
                    "--", color=PALETTE["black"],
                    label=f"envelope exp({slope:.3g} t)")
        if args.fit_report:
            with open(args.fit_report, "w") as fh:
                json.dump({"envelope_rate": -slope}, fh)

    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("norm decay")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.outfile)
    return 0


if __name__ == "__main__":
    sys.exit(main())
