"""Figure rendering for pipeline reports.

Every plot here is a presentation companion to a delimited artifact that
carries the same numbers; figures are written as PNG files next to the CSV
or JSON they illustrate. Rendering uses the Agg backend so it works
headless.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .knn import EvalReport


def plot_correlation(corr: np.ndarray, out_path) -> None:
    fig, ax = plt.subplots(figsize=(9, 8))
    image = ax.imshow(corr, cmap="coolwarm", vmin=-1.0, vmax=1.0, interpolation="nearest")
    ax.set_title("Feature correlation")
    ax.set_xlabel("feature index (manifest order)")
    ax.set_ylabel("feature index (manifest order)")
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_rank(ranked: list[tuple[str, float]], out_path, top: int = 30) -> None:
    head = ranked[:top]
    finite = [s for _, s in head if math.isfinite(s)]
    cap = (max(finite) * 1.05 if finite else 1.0) or 1.0
    names = [fid for fid, _ in head][::-1]
    scores = [s if math.isfinite(s) else cap for _, s in head][::-1]
    fig, ax = plt.subplots(figsize=(8, max(4, 0.28 * len(head))))
    ax.barh(range(len(head)), scores, color="steelblue")
    ax.set_yticks(range(len(head)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xlabel("ANOVA F-statistic (capped where infinite)")
    ax.set_title(f"Top {len(head)} features by class separation")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_label_summary(
    summary: dict[int, dict[str, float]], feature_id: str, out_path
) -> None:
    labels = sorted(summary)
    avgs = [summary[c]["avg"] for c in labels]
    medians = [summary[c]["median"] for c in labels]
    mins = [summary[c]["min"] for c in labels]
    maxs = [summary[c]["max"] for c in labels]
    x = range(len(labels))
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(x, avgs, color="lightsteelblue", label="average")
    ax.vlines(x, mins, maxs, color="gray", linewidth=1, label="min..max")
    ax.plot(x, medians, "k_", markersize=14, label="median")
    ax.set_xticks(list(x))
    ax.set_xticklabels([str(c) for c in labels])
    ax.set_xlabel("label id")
    ax.set_ylabel(feature_id)
    ax.set_title(f"{feature_id} by label")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_confusion(report: EvalReport, out_path) -> None:
    classes = sorted(
        {t for t, _ in report.confusion} | {p for _, p in report.confusion}
    )
    size = len(classes)
    pos = {c: i for i, c in enumerate(classes)}
    grid = np.zeros((size, size))
    for (t, p), count in report.confusion.items():
        grid[pos[t], pos[p]] = count
    fig, ax = plt.subplots(figsize=(6.5, 6))
    image = ax.imshow(grid, cmap="Blues", interpolation="nearest")
    ax.set_xticks(range(size))
    ax.set_xticklabels([str(c) for c in classes])
    ax.set_yticks(range(size))
    ax.set_yticklabels([str(c) for c in classes])
    ax.set_xlabel("predicted label")
    ax.set_ylabel("true label")
    ax.set_title(f"Confusion counts (accuracy {report.accuracy:.4f})")
    for i in range(size):
        for j in range(size):
            if grid[i, j]:
                ax.text(j, i, int(grid[i, j]), ha="center", va="center", fontsize=7)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
