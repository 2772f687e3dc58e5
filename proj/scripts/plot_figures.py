#!/usr/bin/env python3
"""Plot B(T), C(T) and the gap from `srp figures` CSV output."""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", help="output of: srp figures --out figures.csv")
    ap.add_argument("--out", default="figures.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv, comment="#")
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for mu, g in df.groupby("mu"):
        axes[0].plot(g["T"], g["C"], label=f"SRP risk, mu={mu:g}")
        axes[0].plot(g["T"], g["B"], "--", label=f"lower bound, mu={mu:g}")
        axes[1].plot(g["T"], g["gap"], label=f"mu={mu:g}")
    axes[0].set_xlabel("T")
    axes[0].set_ylabel("delay")
    axes[1].set_xlabel("T")
    axes[1].set_ylabel("gap")
    for ax in axes:
        ax.legend()
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
