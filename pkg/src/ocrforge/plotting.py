"""Bar chart of evaluation scores per image condition."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metrics import EvalReport, tag_label  # noqa: E402

METRIC_COLORS = {"Completeness": "#4c72b0", "Hallucination": "#dd8452", "BLEU-1": "#55a868"}


def plot_report(report: EvalReport, path) -> None:
    """Grouped bars (completeness, hallucination, BLEU-1) for each condition and overall."""
    names = [tag_label(t) for t in report.groups] + ["Overall"]
    groups = list(report.groups.values()) + [report.overall]
    series = {
        "Completeness": [g.completeness for g in groups],
        "Hallucination": [g.hallucination for g in groups],
        "BLEU-1": [g.bleu1 for g in groups],
    }
    x = np.arange(len(names))
    width = 0.26
    fig, ax = plt.subplots(figsize=(max(5.0, 1.3 * len(names) + 2), 3.6), dpi=100)
    for k, (label, vals) in enumerate(series.items()):
        bars = ax.bar(x + (k - 1) * width, vals, width, label=label, color=METRIC_COLORS[label])
        ax.bar_label(bars, fmt="%.1f", fontsize=7, padding=1)
    ax.set_xticks(x, names)
    ax.set_ylim(0, 110)
    ax.set_ylabel("score (0-100)")
    ax.set_title(f"Scores by image condition ({report.mode})")
    ax.legend(fontsize=8, ncols=3, loc="upper center", frameon=False)
    ax.spines[["top", "right"]].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
