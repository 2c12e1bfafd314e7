"""Report figures rendered to files next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .benchmark import BenchmarkResult


def render_figures(result: BenchmarkResult, out_dir: str | Path) -> list[Path]:
    """One bar chart per metric (mean with 95% error bars), a rule-count
    comparison when available, and a data preview for 1-D generators.
    Returns the written paths."""
    fig_dir = Path(out_dir) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    config = result.config

    for metric in config.metrics:
        names = [n for n in config.estimators if result.reports[n].means[metric] is not None]
        if not names:
            continue
        means = [result.reports[n].means[metric] for n in names]
        errs = [result.reports[n].half_widths[metric] for n in names]
        fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(names) + 1.5), 3.2))
        ax.bar(range(len(names)), means, yerr=errs, capsize=3, color="#4878d0")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=30, ha="right")
        ax.set_ylabel(metric)
        ax.set_title(f"{metric} (mean ± 95% half-width, {config.replications} reps)")
        fig.tight_layout()
        path = fig_dir / f"{metric}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    if result.rules:
        names = list(result.rules)
        means = [result.rules[n][0] for n in names]
        errs = [result.rules[n][1] for n in names]
        fig, ax = plt.subplots(figsize=(4.0, 3.2))
        ax.bar(range(len(names)), means, yerr=errs, capsize=3, color="#d65f5f")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names)
        ax.set_ylabel("pruned rule count")
        fig.tight_layout()
        path = fig_dir / "rules.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    data = result.preview
    if data is not None and data.d == 1:
        fig, ax = plt.subplots(figsize=(4.8, 3.2))
        for label, color, marker in ((0, "#4878d0", "o"), (1, "#d65f5f", "^")):
            sel = data.treatment == label
            ax.scatter(data.covariates[sel, 0], data.outcome[sel], s=8, alpha=0.5,
                       c=color, marker=marker, label=f"t={label}")
        ax.set_xlabel("x0")
        ax.set_ylabel("y")
        ax.legend()
        fig.tight_layout()
        path = fig_dir / "data.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


__all__ = ["render_figures"]
