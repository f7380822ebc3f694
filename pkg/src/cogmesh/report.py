"""Figure rendering for run and comparison outputs.

matplotlib is imported lazily with the Agg backend so headless use and
plain library imports stay cheap.
"""

from __future__ import annotations

from pathlib import Path

from .engine import EventKind, EventRecord, LearningComparison, RunMetrics
from .selfmgmt import SuMode

_MODE_LEVEL = {mode.value: i for i, mode in enumerate(SuMode)}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_run_figures(
    events: list[EventRecord], metrics: RunMetrics, duration_s: float, outdir
) -> list[Path]:
    """Write mode_timeline.png and offer_classes.png into outdir."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    plt = _pyplot()
    written = []

    times = [0.0]
    levels = [_MODE_LEVEL[SuMode.SENSING.value]]
    for ev in events:
        if ev.kind is EventKind.MODE_CHANGE:
            times.append(ev.time)
            levels.append(_MODE_LEVEL[ev.payload["to"]])
    times.append(duration_s)
    levels.append(levels[-1])
    fig, ax = plt.subplots(figsize=(10, 3))
    ax.step(times, levels, where="post")
    ax.set_yticks(list(_MODE_LEVEL.values()), list(_MODE_LEVEL.keys()))
    ax.set_xlabel("time (s)")
    ax.set_title("self-management mode over time")
    ax.set_xlim(0, duration_s)
    fig.tight_layout()
    path = outdir / "mode_timeline.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    written.append(path)

    classes = ["C1", "C2", "C3"]
    counts = [metrics.offers_by_class.get(c, 0) for c in classes]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(classes, counts, color=["#2a9d2a", "#e0a800", "#c43c3c"])
    ax.set_ylabel("spectrum offers")
    ax.set_title("offered QoS classes")
    fig.tight_layout()
    path = outdir / "offer_classes.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    written.append(path)
    return written


def render_comparison_figure(comparison: LearningComparison, path) -> Path:
    """Paired per-seed failure rates, knowledge ranking on vs off."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for on, off in zip(comparison.failure_rate_on, comparison.failure_rate_off):
        ax.plot([0, 1], [off, on], color="0.75", linewidth=0.8, zorder=1)
    ax.scatter([0] * len(comparison.seeds), comparison.failure_rate_off, label="ranking off", zorder=2)
    ax.scatter([1] * len(comparison.seeds), comparison.failure_rate_on, label="ranking on", zorder=2)
    ax.plot([0, 1], [comparison.mean_off, comparison.mean_on], color="black", marker="_", markersize=18, label="mean")
    ax.set_xticks([0, 1], ["knowledge off", "knowledge on"])
    ax.set_xlim(-0.4, 1.4)
    ax.set_ylabel("negotiation failure rate")
    ax.set_title("cooperation learning, paired seeds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
