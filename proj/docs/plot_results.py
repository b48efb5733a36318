#!/usr/bin/env python3
"""Plot CSV files written by helmholtz-cip.

usage: plot_results.py FILE.csv [--save out.png]
"""
import argparse
import sys

import matplotlib.pyplot as plt
import pandas as pd


def read(path):
    with open(path) as fh:
        first = fh.readline().strip()
    if not first.startswith("# helmholtz-cip v1 "):
        sys.exit(f"{path}: not a helmholtz-cip v1 file")
    return first.split()[-1], pd.read_csv(path, comment="#")


def plot(kind, df, ax):
    if kind == "convergence":
        for col in ["h1_cip", "h1_fem", "h1_interp"]:
            ax.loglog(df["dofs"], df[col], "o-", label=col)
        ax.set_xlabel("DOFs")
        ax.set_ylabel("relative H1 error")
    elif kind == "stability":
        for col in ["grad_uh", "grad_fem", "grad_exact", "c_sta"]:
            ax.loglog(df["k"], df[col], "o-", label=col)
        ax.set_xlabel("k")
    elif kind == "critical-h":
        ax.loglog(df["k"], df["h"], "o-", label="h(k)")
        ax.set_xlabel("k")
        ax.set_ylabel("critical h")
    elif kind == "trace":
        ax.plot(df["t"], df["re"], label="Re u_h")
        ax.plot(df["t"], df["re_exact"], "--", label="Re u")
        ax.set_xlabel("t")
    elif kind == "export-surface":
        sc = ax.tricontourf(df["x"], df["y"], df["re"], levels=40)
        plt.colorbar(sc, ax=ax)
        ax.set_aspect("equal")
    elif kind == "fem-limit":
        ax.loglog(df["gamma"], df["h1_difference"], "o-", label="|u_gamma - u_fem|")
        ax.set_xlabel("gamma")
    else:
        sys.exit(f"no plot for kind '{kind}'")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--save")
    args = ap.parse_args()
    kind, df = read(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    plot(kind, df, ax)
    ax.set_title(kind)
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
