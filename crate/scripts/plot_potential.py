#!/usr/bin/env python3
"""Plot a `soliton potential` CSV: tau(t), the potential f(t), and f''(t).

Usage: plot_potential.py potential.csv [out.png]
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    table = pd.read_csv(sys.argv[1])
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 9))
    axes[0].plot(table["t"], table["tau"])
    axes[0].set_ylabel("tau = f'(t)")
    axes[1].plot(table["t"], table["f"])
    axes[1].set_ylabel("f(t)")
    axes[2].plot(table["t"], table["fpp"], label="f''")
    axes[2].plot(table["t"], table["fppp"], label="f'''")
    axes[2].set_xlabel("t")
    axes[2].legend()
    fig.tight_layout()
    if len(sys.argv) > 2:
        fig.savefig(sys.argv[2], dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
