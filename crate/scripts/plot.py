#!/usr/bin/env python3
"""Render figures from the CSVs written by `certify`.

    python scripts/plot.py run out/            # interval, sigma*, entropy, simulated share
    python scripts/plot.py sweep sweep.csv
    python scripts/plot.py bench bench.csv
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

WINDOW = 200


def load_logs(run_dir):
    logs = {}
    for kind in ("brute", "proxy"):
        path = run_dir / f"{kind}_log.csv"
        if path.exists():
            df = pd.read_csv(path)
            df["iteration"] = range(1, len(df) + 1)
            logs[kind] = df
    if not logs:
        raise SystemExit(f"no brute_log.csv or proxy_log.csv in {run_dir}")
    return logs


def plot_run(run_dir, out_dir, reference):
    logs = load_logs(run_dir)

    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
    for kind, df in logs.items():
        for ax, x in zip(axes, ("iteration", "n_sims")):
            ax.fill_between(df[x], df["p_min"], df["p_max"], alpha=0.35, step="post", label=kind)
    for ax, label in zip(axes, ("iterations", "simulations")):
        if reference is not None:
            ax.axhline(reference, color="k", lw=0.8, ls="--", label="reference")
        ax.set_xlabel(label)
        ax.set_xscale("log")
        ax.legend()
    axes[0].set_ylabel("p_safe interval")
    lo = min(df["p_min"].iloc[len(df) // 20:].min() for df in logs.values())
    axes[0].set_ylim(max(lo - 0.02, 0.0), 1.0)
    fig.tight_layout()
    fig.savefig(out_dir / "intervals.png", dpi=150)
    plt.close(fig)

    proxy = logs.get("proxy")
    if proxy is None:
        return
    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    axes[0].plot(proxy["iteration"], proxy["sigma_star"].rolling(WINDOW).mean())
    axes[0].set_ylabel(f"sigma* ({WINDOW}-pt mean)")
    axes[0].set_yscale("log")
    axes[1].plot(proxy["iteration"], proxy["entropy"].rolling(WINDOW).mean())
    axes[1].set_ylabel(f"entropy ({WINDOW}-pt mean)")
    axes[2].plot(proxy["iteration"], proxy["n_sims"] / proxy["iteration"])
    axes[2].set_ylabel("simulated share")
    axes[2].set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(out_dir / "proxy_metrics.png", dpi=150)
    plt.close(fig)


def plot_sweep(path, out_dir):
    df = pd.read_csv(path).set_index("precision")
    fig, ax = plt.subplots(figsize=(6, 4))
    for col in df.columns:
        p = col.removeprefix("Probability_").replace("_", ".")
        ax.plot(df.index, df[col], marker="o", label=f"p = {p}")
    ax.set_xlabel("relative precision (%)")
    ax.set_ylabel("mean simulations")
    ax.set_yscale("log")
    ax.invert_xaxis()
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "sweep.png", dpi=150)
    plt.close(fig)


def plot_bench(path, out_dir):
    df = pd.read_csv(path)
    stats = df.groupby("dimension")["seconds"].agg(["mean", "std"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(stats.index, stats["mean"], yerr=stats["std"], marker="o", capsize=3)
    ax.set_xlabel("dimension")
    ax.set_ylabel("seconds per evaluation")
    fig.tight_layout()
    fig.savefig(out_dir / "bench_cdf.png", dpi=150)
    plt.close(fig)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("kind", choices=("run", "sweep", "bench"))
    parser.add_argument("input", type=Path, help="run output directory or CSV file")
    parser.add_argument("--out", type=Path, help="directory for PNGs (default: next to the input)")
    parser.add_argument("--reference", type=float, help="known p_safe drawn as a line")
    args = parser.parse_args()

    default_dir = args.input if args.input.is_dir() else args.input.parent
    out_dir = args.out or default_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.kind == "run":
        plot_run(args.input, out_dir, args.reference)
    elif args.kind == "sweep":
        plot_sweep(args.input, out_dir)
    else:
        plot_bench(args.input, out_dir)


if __name__ == "__main__":
    main()
