#!/usr/bin/env python3
"""Plot the CSVs written by the vibronic CLI.

usage: plot.py OUT_DIR [--save FILE]

Plots whichever of autocorr.csv, populations.csv, boundary.csv, spectrum.csv and
shots_tvd.csv are present in OUT_DIR.
"""
import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--save", type=Path, help="write the figure instead of showing it")
    args = ap.parse_args()

    panels = []
    d = args.out_dir
    if (d / "autocorr.csv").exists():
        panels.append(("autocorr", pd.read_csv(d / "autocorr.csv")))
    if (d / "populations.csv").exists():
        panels.append(("populations", pd.read_csv(d / "populations.csv")))
    if (d / "boundary.csv").exists():
        panels.append(("boundary", pd.read_csv(d / "boundary.csv")))
    if (d / "spectrum.csv").exists():
        panels.append(("spectrum", pd.read_csv(d / "spectrum.csv")))
    if (d / "shots_tvd.csv").exists():
        panels.append(("shots", pd.read_csv(d / "shots_tvd.csv")))
    if not panels:
        raise SystemExit(f"no CSVs found in {d}")

    fig, axes = plt.subplots(len(panels), 1, figsize=(7, 2.8 * len(panels)), squeeze=False)
    for ax, (kind, df) in zip(axes[:, 0], panels):
        if kind == "autocorr":
            ax.plot(df.t_fs, df["abs"], label="|A(t)|")
            ax.plot(df.t_fs, df.re, lw=0.6, label="Re A(t)")
            ax.set_xlabel("t (fs)")
        elif kind == "populations":
            ax.plot(df.t_fs, df.p_s1, label="S1")
            ax.plot(df.t_fs, df.p_s2, label="S2")
            ax.set_xlabel("t (fs)")
            ax.set_ylabel("population")
        elif kind == "boundary":
            for c in df.columns[1:-1]:
                ax.semilogy(df.t_fs, df[c].clip(lower=1e-16), label=c)
            ax.axhline(1e-3, color="k", ls=":", lw=0.8)
            ax.set_xlabel("t (fs)")
            ax.set_ylabel("edge-slice probability")
        elif kind == "spectrum":
            ax.plot(df.energy_ev, df.intensity)
            ax.set_xlabel("E (eV)")
            ax.set_ylabel("intensity")
        elif kind == "shots":
            for (mode, seed), g in df.groupby(["mode", "seed"]):
                ax.loglog(g.shots, g.tvd, lw=0.5, color="C0" if mode == "direct" else "C1",
                          label=mode if seed == df.seed.min() else None)
            ax.set_xlabel("shots")
            ax.set_ylabel("TVD")
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=8)
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
