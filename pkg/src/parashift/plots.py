"""Figure rendering for trace and bench CSV files (headless backend)."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def plot_trace(trace_path: str, out_path: str, title: str | None = None):
    """Two-axis progress figure: served requests and total working minutes
    over elapsed search seconds."""
    xs, served, working = [], [], []
    with open(trace_path, newline="") as fh:
        for row in csv.DictReader(fh):
            xs.append(float(row["elapsed_s"]))
            served.append(int(row["served"]))
            working.append(int(row["working_minutes"]))
    fig, ax1 = plt.subplots(figsize=(8, 4.5))
    ax1.step(xs, served, where="post", color="tab:blue", label="served")
    ax1.set_xlabel("elapsed (s)")
    ax1.set_ylabel("requests served", color="tab:blue")
    ax1.tick_params(axis="y", labelcolor="tab:blue")
    ax2 = ax1.twinx()
    ax2.step(xs, working, where="post", color="tab:red", label="working minutes")
    ax2.set_ylabel("working minutes", color="tab:red")
    ax2.tick_params(axis="y", labelcolor="tab:red")
    if title:
        ax1.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_bench(bench_path: str, out_path: str, title: str | None = None):
    """Grouped bars of served counts per instance, one bar group per mode."""
    instances: list[str] = []
    modes: list[str] = []
    served: dict[tuple[str, str], int] = {}
    with open(bench_path, newline="") as fh:
        for row in csv.DictReader(fh):
            inst = row["instance"]
            mode = row["mode"]
            if inst not in instances:
                instances.append(inst)
            if mode not in modes:
                modes.append(mode)
            served[(inst, mode)] = int(row["served"])
    fig, ax = plt.subplots(figsize=(max(8, 0.5 * len(instances) * len(modes)), 4.5))
    width = 0.8 / max(1, len(modes))
    for mi, mode in enumerate(modes):
        xs = [i + mi * width for i in range(len(instances))]
        ys = [served.get((inst, mode), 0) for inst in instances]
        ax.bar(xs, ys, width=width, label=mode)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(instances))])
    ax.set_xticklabels(instances, rotation=45, ha="right")
    ax.set_ylabel("requests served")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
