#!/usr/bin/env python3
"""Plot a `soliton solve` CSV: the momentum profile, its derivative, and the
ODE residual against tau.

Usage: plot_profile.py solve.csv [out.png]
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    table = pd.read_csv(sys.argv[1])
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 7))
    top.plot(table["tau"], table["phi"], label="phi")
    top.plot(table["tau"], table["phi_prime"], label="phi'")
    top.set_xscale("log")
    top.set_ylabel("profile")
    top.legend()
    bottom.plot(table["tau"], table["ode_residual"].abs(), color="tab:red")
    bottom.set_xscale("log")
    bottom.set_yscale("log")
    bottom.set_xlabel("tau")
    bottom.set_ylabel("|ODE residual|")
    fig.tight_layout()
    if len(sys.argv) > 2:
        fig.savefig(sys.argv[2], dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
