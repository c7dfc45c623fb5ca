"""Figure rendering for experiment summaries.

Each run saves a two-panel figure next to its CSV: population reward per
window on top (per-seed traces plus the across-seed mean, and the central
planner's constant line when present), delegation fraction below.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import RunSummary


def _by_window(summary: RunSummary, name: str) -> tuple[np.ndarray, np.ndarray]:
    starts = sorted({r.window_start for r in summary.rows})
    table = {s: [] for s in starts}
    for row in summary.rows:
        table[row.window_start].append(getattr(row, name))
    means = np.array([np.mean(table[s]) for s in starts])
    return np.array(starts), means


def render_summary_figure(summary: RunSummary, path, title: str | None = None) -> None:
    """Save a PNG of the run's reward and delegation curves."""
    fig, (ax_reward, ax_delegate) = plt.subplots(
        2, 1, figsize=(7, 6), sharex=True, height_ratios=[2, 1]
    )
    seeds = summary.seeds
    for seed in seeds:
        rows = [r for r in summary.rows if r.seed == seed]
        rows.sort(key=lambda r: r.window_start)
        xs = [r.window_start for r in rows]
        ax_reward.plot(xs, [r.mean_reward for r in rows], color="tab:blue", alpha=0.15, lw=0.8)
        ax_delegate.plot(
            xs, [r.delegation_fraction for r in rows], color="tab:orange", alpha=0.15, lw=0.8
        )
    starts, reward_mean = _by_window(summary, "mean_reward")
    ax_reward.plot(starts, reward_mean, color="tab:blue", lw=2.0, label="mean reward")
    if summary.has_central_plan:
        plan = np.mean([r.central_plan_reward for r in summary.final_rows()])
        ax_reward.axhline(plan, color="tab:green", ls="--", lw=1.5, label="central planner")
    _, delegate_mean = _by_window(summary, "delegation_fraction")
    ax_delegate.plot(starts, delegate_mean, color="tab:orange", lw=2.0)

    ax_reward.set_ylabel("mean population reward")
    ax_reward.legend(loc="best", fontsize=9)
    ax_delegate.set_ylabel("delegation fraction")
    ax_delegate.set_ylim(-0.02, 1.02)
    ax_delegate.set_xlabel("step (window start)")
    if title is None:
        title = f"{summary.scenario} / mediator={summary.mediator} ({len(seeds)} seeds)"
    ax_reward.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
