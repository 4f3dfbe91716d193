"""Optional figure rendering next to the delimited outputs.

Curves and reports are primarily CSV/JSON; these helpers draw the same
data to an image file when a command is given ``--plot``. PNG output is
written without the renderer-version metadata chunk, so repeated runs
produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from influx.analysis import ConcordanceCurve, SweepCurve
from influx.influence import InfluenceReport


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    kwargs = {"dpi": 150, "bbox_inches": "tight"}
    if path.suffix.lower() == ".png":
        kwargs["metadata"] = {"Software": None}
    fig.savefig(path, **kwargs)
    plt.close(fig)


def save_report_plot(report: InfluenceReport, path: str | Path, unit: str = "nats") -> None:
    scale = 1.0 if unit == "nats" else 1.4426950408889634  # 1 / ln 2
    labels = ["total", "question", "context", "semantic", "linguistic"]
    values = [
        report.total,
        report.element_question,
        report.element_context,
        report.semantic,
        report.linguistic,
    ]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.barh(labels[::-1], [v * scale for v in values[::-1]], color="#4878cf")
    ax.set_xlabel(f"influence ({unit})")
    ax.set_title("influence decomposition")
    ax.grid(axis="x", alpha=0.3)
    _save(fig, path)


def save_sweep_plot(curve: SweepCurve, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    xs = [p.fraction for p in curve.points]
    ys = [p.value for p in curve.points]
    ax.plot(xs, ys, marker="o", label="ranked")
    if curve.baseline is not None:
        bx = [p.fraction for p in curve.baseline]
        by = [p.value for p in curve.baseline]
        ax.plot(bx, by, marker="s", linestyle="--", color="gray",
                label=f"random (seed {curve.baseline_seed})")
        ax.legend()
    ax.set_xlabel("fraction of top-ranked instances retained")
    ax.set_ylabel(curve.value.replace("_", " "))
    ax.grid(alpha=0.3)
    _save(fig, path)


def save_concordance_plot(curve: ConcordanceCurve, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    defined = [p for p in curve.points if p.value is not None]
    ax.plot(
        [p.fraction for p in defined],
        [p.value for p in defined],
        marker="o",
        label=f"min gap {curve.min_gap:g}",
    )
    ax.set_xlabel("fraction of lowest-entropy cells retained")
    ax.set_ylabel("pairwise ordering agreement")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    _save(fig, path)
