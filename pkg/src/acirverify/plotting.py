"""Matplotlib rendering for benchmark reports."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

COLORS = {"ff-split": "#1f77b4", "ff-gb": "#ff7f0e", "int": "#2ca02c"}
LABELS = {"ff-split": "ff (split)", "ff-gb": "ff (gb)", "int": "int"}


def bench_figure(rows, backends, timeout_s, path, width=8.0):
    """Grouped bar chart of solve times; timeouts are hatched bars at the cutoff."""
    n = max(len(rows), 1)
    fig, ax = plt.subplots(figsize=(max(width, 0.9 * n * len(backends) / 2), 4.5))
    x = np.arange(len(rows))
    bar = 0.8 / max(len(backends), 1)
    for k, name in enumerate(backends):
        offs = x + (k - (len(backends) - 1) / 2) * bar
        for xi, row in zip(offs, rows):
            t = row.times.get(name)
            if isinstance(t, (int, float)):
                ax.bar(xi, t, bar, color=COLORS.get(name))
            else:
                ax.bar(xi, timeout_s, bar, color="none", edgecolor=COLORS.get(name), hatch="//")
                ax.text(xi, timeout_s, t or "?", ha="center", va="bottom", fontsize=8)
        ax.bar([], [], color=COLORS.get(name), label=LABELS.get(name, name))
    ax.set_xticks(x)
    ax.set_xticklabels([r.id for r in rows], rotation=30, ha="right")
    ax.set_ylabel("time (s)")
    ax.set_yscale("symlog", linthresh=0.1)
    ax.axhline(timeout_s, color="grey", lw=0.8, ls="--")
    ax.legend(frameon=False, ncol=len(backends))
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
