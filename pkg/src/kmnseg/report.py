"""Rendered reports: CSV tables and PNG figures next to the JSON.

Figures are rendered with the Agg backend and written without software
metadata so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .imageio import write_json

_PNG_META = {"Software": None}


def save_eval_report(out_dir, scores: dict) -> list[Path]:
    """Write eval.json, eval.csv and a per-frame score figure.

    Returns the written paths. The CSV has one row per scored frame and
    object with its region (J) and boundary (F) scores.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "eval.json"
    write_json(json_path, scores)

    csv_path = out / "eval.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "object", "J", "F"])
        for obj in scores["object_ids"]:
            rec = scores["objects"][str(obj)]
            for i, t in enumerate(scores["frames_scored"]):
                writer.writerow(
                    [t, obj, repr(rec["J_per_frame"][i]), repr(rec["F_per_frame"][i])]
                )

    fig_path = out / "eval_scores.png"
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
    for obj in scores["object_ids"]:
        rec = scores["objects"][str(obj)]
        axes[0].plot(scores["frames_scored"], rec["J_per_frame"], marker="o", label=f"object {obj}")
        axes[1].plot(scores["frames_scored"], rec["F_per_frame"], marker="o", label=f"object {obj}")
    axes[0].set_title(f"region J (mean {scores['J_mean']:.3f})")
    axes[1].set_title(f"boundary F (mean {scores['F_mean']:.3f})")
    for ax in axes:
        ax.set_xlabel("frame")
        ax.set_ylim(-0.05, 1.05)
        ax.grid(True, alpha=0.3)
    axes[0].set_ylabel("score")
    axes[0].legend(loc="lower left", fontsize=8)
    fig.suptitle(f"global mean {scores['global_mean']:.3f}")
    fig.tight_layout()
    fig.savefig(fig_path, metadata=_PNG_META)
    plt.close(fig)
    return [json_path, csv_path, fig_path]


def save_bench_report(out_dir, bench: dict) -> list[Path]:
    """Write bench.json, bench.csv and a timing bar figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "bench.json"
    write_json(json_path, bench)

    csv_path = out / "bench.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["case", "t", "h", "w", "d", "memory_cells", "min_ms", "median_ms", "max_rel_err"]
        )
        for row in bench["cases"]:
            writer.writerow(
                [
                    row["case"],
                    row["t"],
                    row["h"],
                    row["w"],
                    row["d"],
                    row["memory_cells"],
                    repr(row["min_ms"]),
                    repr(row["median_ms"]),
                    repr(row["max_rel_err"]),
                ]
            )

    fig_path = out / "bench_times.png"
    labels = [row["case"] for row in bench["cases"]]
    medians = [row["median_ms"] for row in bench["cases"]]
    mins = [row["min_ms"] for row in bench["cases"]]
    fig, ax = plt.subplots(figsize=(1.8 + 1.4 * len(labels), 3.5))
    xs = range(len(labels))
    ax.bar(xs, medians, width=0.6, label="median")
    ax.plot(xs, mins, "k_", markersize=18, label="min")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("ms per correlation")
    ax.set_title(f"fast correlation, {bench['workers']} worker(s)")
    ax.legend(fontsize=8)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(fig_path, metadata=_PNG_META)
    plt.close(fig)
    return [json_path, csv_path, fig_path]
