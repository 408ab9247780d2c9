#!/usr/bin/env python3
"""
Decay-rate scaling figure from a linear-verify fit report.

Shows the measured decay rates against |k| per viscosity on log-log axes,
overlays the jointly fitted power law C nu^b |k|^a, and optionally writes
the maximum relative residual of that fit (the envelope-fit quality gate).
"""

import argparse
import json
import sys

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from common import PALETTE, CsvFormatError, floats, read_table  # noqa: E402


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="infile", required=True,
                        help="linear_fit_report.csv from lcsim linear-verify")
    parser.add_argument("--out", dest="outfile", required=True)
    parser.add_argument("--residual-report", default=None,
                        help="optional JSON with fit exponents and residuals")
    args = parser.parse_args(argv)

    try:
        cols = read_table(args.infile, ["k", "nu", "rate"])
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    k = np.asarray(floats(cols["k"], args.infile, "k"))
    nu = np.asarray(floats(cols["nu"], args.infile, "nu"))
    rate = np.asarray(floats(cols["rate"], args.infile, "rate"))
    if len(k) < 4:
        print("error: need at least 4 fit rows", file=sys.stderr)
        return 2

    design = np.column_stack([np.ones(len(k)), np.log(k), np.log(nu)])
    coef, *_ = np.linalg.lstsq(design, np.log(rate), rcond=None)
    predicted = np.exp(design @ coef)
    residual = float(np.max(np.abs(rate / predicted - 1.0)))

    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    colors = [PALETTE["blue"], PALETTE["orange"], PALETTE["green"],
              PALETTE["purple"], PALETTE["sky"]]
    for idx, nu_val in enumerate(sorted(set(nu))):
        sel = nu == nu_val
        color = colors[idx % len(colors)]
        order = np.argsort(k[sel])
        ax.loglog(k[sel][order], rate[sel][order], "o", color=color,
                  label=f"nu = {nu_val:g}")
        kk = np.geomspace(k[sel].min(), k[sel].max(), 50)
        ax.loglog(kk, np.exp(coef[0]) * kk ** coef[1] * nu_val ** coef[2],
                  "--", color=color, alpha=0.7)
    ax.set_xlabel("|k|")
    ax.set_ylabel("decay rate")
    ax.set_title(f"rate ~ C nu^{coef[2]:.3f} |k|^{coef[1]:.3f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.outfile)

    if args.residual_report:
        with open(args.residual_report, "w") as fh:
            json.dump({"exponent_k": float(coef[1]),
                       "exponent_nu": float(coef[2]),
                       "prefactor": float(np.exp(coef[0])),
                       "max_relative_residual": residual}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
