"""Figure rendering for comprehension reports.

Kept separate from the CLI so matplotlib is only imported when figures
were actually requested.
"""

from __future__ import annotations

from pathlib import Path


def render_report_figures(report: dict, out_dir: str | Path) -> list[Path]:
    """Render a comprehension report to PNG files; returns the paths written.

    One stacked-bar chart of per-slide rating distributions (flagged slides
    marked on the axis) and one totals chart for the whole session.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    labels = report["classes"]
    positive = report["positive"]
    slides = report["slides"]
    flagged = set(report["flagged"])
    keys = list(slides)
    written = []

    fig, ax = plt.subplots(figsize=(max(6.0, 0.7 * len(keys) + 2.0), 4.0))
    bottoms = [0] * len(keys)
    for label in labels:
        values = [slides[key]["counts"][label] for key in keys]
        ax.bar(range(len(keys)), values, bottom=bottoms, label=label)
        bottoms = [b + v for b, v in zip(bottoms, values)]
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(keys, rotation=45, ha="right")
    for tick, key in zip(ax.get_xticklabels(), keys):
        if key in flagged:
            tick.set_color("red")
            tick.set_fontweight("bold")
    ax.axhline(report["quorum"], linestyle=":", linewidth=1, color="gray")
    ax.set_ylabel("ratings")
    ax.set_title("Comprehension by slide (flagged slides in red, dotted line = quorum)")
    ax.legend()
    fig.tight_layout()
    per_slide = out / "comprehension.png"
    fig.savefig(per_slide)
    plt.close(fig)
    written.append(per_slide)

    fig, ax = plt.subplots(figsize=(4.0, 4.0))
    totals = [report["totals"]["counts"][label] for label in labels]
    colors = ["tab:green" if label == positive else "tab:red" for label in labels]
    ax.bar(labels, totals, color=colors, alpha=0.7)
    ax.set_ylabel("ratings")
    ax.set_title("Session totals")
    fig.tight_layout()
    totals_path = out / "totals.png"
    fig.savefig(totals_path)
    plt.close(fig)
    written.append(totals_path)
    return written
