"""Figure rendering for mapping runs and evaluation reports.

Matplotlib is imported lazily with the Agg backend so headless use and
plain library imports stay cheap.
"""
from __future__ import annotations


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_convergence(deltas_by_pos: dict, path) -> None:
    """Per-iteration weight deltas, one line per part of speech.

    deltas_by_pos maps a pos code to the list of max per-iteration
    weight changes recorded for that phase problem.
    """
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    drew = False
    for code in sorted(deltas_by_pos):
        deltas = deltas_by_pos[code]
        if not deltas:
            continue
        ax.semilogy(range(1, len(deltas) + 1), deltas, marker=".", label=code)
        drew = True
    ax.set_xlabel("iteration")
    ax.set_ylabel("max weight change")
    ax.set_title("Relaxation convergence")
    ax.grid(True, which="both", alpha=0.3)
    if drew:
        ax.legend(title="pos")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_report(reports: dict, path) -> None:
    """Precision and recall intervals per part of speech.

    reports maps a pos code to an EvalReport.  Each metric is drawn as
    a bar spanning its pessimistic-to-optimistic interval.
    """
    plt = _plt()
    codes = sorted(reports)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.5), sharey=True)
    for ax, metric in zip(axes, ("precision", "recall")):
        labels = []
        for i, code in enumerate(codes):
            score = reports[code].overall
            low = getattr(score, f"{metric}_low")
            high = getattr(score, f"{metric}_high")
            labels.append(code)
            if low is None or high is None:
                continue
            ax.bar(i, max(high - low, 0.004), bottom=low, width=0.55, alpha=0.75)
            ax.plot([i - 0.3, i + 0.3], [low, low], color="black", lw=1)
        ax.set_xticks(range(len(codes)))
        ax.set_xticklabels(labels)
        ax.set_ylim(0, 1.05)
        ax.set_title(metric)
        ax.grid(True, axis="y", alpha=0.3)
    axes[0].set_ylabel("interval (pessimistic to optimistic)")
    fig.suptitle("Evaluation against gold sample")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
